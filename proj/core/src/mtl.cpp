#include "argsarc/mtl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace argsarc::mtl {

std::string to_string(TaskId t) { return t == TaskId::Arg ? "arg" : "sarc"; }

double sum_loss(const std::vector<TaskLoss>& losses) {
    if (losses.empty()) throw std::runtime_error("sum_loss needs at least one loss");
    double total = 0.0;
    for (const auto& l : losses) total += l.value;
    return total;
}

namespace {

double log_var_for(const UncertaintyParams& params, TaskId task) {
    return task == TaskId::Arg ? params.log_var_arg : params.log_var_sarc;
}

}  // namespace

double uncertainty_loss(const std::vector<TaskLoss>& losses, const UncertaintyParams& params) {
    if (losses.empty()) throw std::runtime_error("uncertainty_loss needs at least one loss");
    double total = 0.0;
    for (const auto& l : losses) {
        if (!std::isfinite(l.value)) throw std::runtime_error("non-finite task loss");
        double lv = log_var_for(params, l.task_id);
        total += std::exp(-lv) / 2.0 * l.value + lv;
    }
    if (!std::isfinite(total)) throw std::runtime_error("non-finite uncertainty loss");
    return total;
}

double uncertainty_loss_grad_log_var(double task_loss, double log_var) {
    return -task_loss * std::exp(-log_var) / 2.0 + 1.0;
}

nn::Node* uncertainty_loss_node(nn::Graph& g, const std::vector<nn::Node*>& losses,
                                const std::vector<nn::Node*>& log_vars) {
    if (losses.empty() || losses.size() != log_vars.size()) {
        throw std::runtime_error("uncertainty_loss_node: one log_var per loss required");
    }
    nn::Node* total = nullptr;
    for (size_t t = 0; t < losses.size(); ++t) {
        nn::Node* inv_var = g.exp(g.scale(log_vars[t], -1.0));
        nn::Node* weighted = g.scale(g.cwise_mul(inv_var, losses[t]), 0.5);
        nn::Node* term = g.add(weighted, log_vars[t]);
        total = total ? g.add(total, term) : term;
    }
    return total;
}

BatchSchedule build_alternating_schedule(int n_arg_batches, int n_sarc_batches, uint64_t seed) {
    if (n_arg_batches < 0 || n_sarc_batches < 0) {
        throw std::runtime_error("negative batch count");
    }
    std::vector<int> arg_order(n_arg_batches), sarc_order(n_sarc_batches);
    std::iota(arg_order.begin(), arg_order.end(), 0);
    std::iota(sarc_order.begin(), sarc_order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(arg_order.begin(), arg_order.end(), rng);
    std::shuffle(sarc_order.begin(), sarc_order.end(), rng);

    BatchSchedule schedule;
    size_t ai = 0, si = 0;
    // strict alternation, arg first, while both remain
    while (ai < arg_order.size() && si < sarc_order.size()) {
        schedule.entries.push_back({TaskId::Arg, arg_order[ai++]});
        schedule.entries.push_back({TaskId::Sarc, sarc_order[si++]});
    }
    while (ai < arg_order.size()) schedule.entries.push_back({TaskId::Arg, arg_order[ai++]});
    while (si < sarc_order.size()) schedule.entries.push_back({TaskId::Sarc, sarc_order[si++]});
    return schedule;
}

void check_dispatch(const ScheduleEntry& entry, TaskId batch_task) {
    if (entry.task != batch_task) {
        throw std::runtime_error("schedule entry for task '" + to_string(entry.task) +
                                 "' dispatched with a '" + to_string(batch_task) + "' batch");
    }
}

std::string step_log_to_json_line(const StepLogEntry& entry) {
    nlohmann::json j;
    j["step"] = entry.step;
    j["task"] = to_string(entry.task);
    j["loss"] = entry.loss;
    j["log_var_arg"] = entry.log_var_arg;
    j["log_var_sarc"] = entry.log_var_sarc;
    return j.dump();
}

}  // namespace argsarc::mtl
