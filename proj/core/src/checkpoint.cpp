#include "argsarc/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace argsarc::checkpoint {

namespace {

constexpr char kMagic[4] = {'A', 'S', 'C', 'K'};

void write_u32(std::ostream& os, uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::istream& is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw std::runtime_error("truncated checkpoint file");
    return v;
}

}  // namespace

void save_weights(const nn::ParameterStore& params, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint: " + path);
    os.write(kMagic, 4);
    auto all = params.all();
    write_u32(os, static_cast<uint32_t>(all.size()));
    for (const auto* p : all) {
        write_u32(os, static_cast<uint32_t>(p->name.size()));
        os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
        write_u32(os, static_cast<uint32_t>(p->value.rows()));
        write_u32(os, static_cast<uint32_t>(p->value.cols()));
        std::vector<float> buf(p->value.size());
        size_t at = 0;
        for (int r = 0; r < p->value.rows(); ++r) {
            for (int c = 0; c < p->value.cols(); ++c) {
                buf[at++] = static_cast<float>(p->value(r, c));
            }
        }
        os.write(reinterpret_cast<const char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
}

void load_weights(nn::ParameterStore& params, const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("bad checkpoint magic in " + path);
    }
    uint32_t count = read_u32(is);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t name_len = read_u32(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        uint32_t rows = read_u32(is);
        uint32_t cols = read_u32(is);
        std::vector<float> buf(static_cast<size_t>(rows) * cols);
        is.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!is) throw std::runtime_error("truncated checkpoint tensor '" + name + "'");
        auto& p = params.get(name);
        if (p.value.rows() != static_cast<int>(rows) || p.value.cols() != static_cast<int>(cols)) {
            throw std::runtime_error("checkpoint shape mismatch for '" + name + "'");
        }
        size_t at = 0;
        for (uint32_t r = 0; r < rows; ++r) {
            for (uint32_t c = 0; c < cols; ++c) {
                p.value(r, c) = buf[at++];
            }
        }
    }
}

}  // namespace argsarc::checkpoint
