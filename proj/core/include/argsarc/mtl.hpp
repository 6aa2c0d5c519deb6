#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "argsarc/autodiff.hpp"

namespace argsarc::mtl {

enum class TaskId { Arg, Sarc };

std::string to_string(TaskId t);

struct TaskLoss {
    TaskId task_id;
    double value;  // non-negative, finite
};

// Learnable log sigma^2 per task, initialized 0. sigma^2 = exp(log_var)
// stays positive by construction.
struct UncertaintyParams {
    double log_var_arg = 0.0;
    double log_var_sarc = 0.0;
};

double sum_loss(const std::vector<TaskLoss>& losses);

// L = sum_t exp(-log_var_t)/2 * L_t + log_var_t
double uncertainty_loss(const std::vector<TaskLoss>& losses, const UncertaintyParams& params);

// dL/dlog_var_t = -L_t * exp(-log_var_t) / 2 + 1
double uncertainty_loss_grad_log_var(double task_loss, double log_var);

// Graph form, differentiable in both the losses and the log-variances.
nn::Node* uncertainty_loss_node(nn::Graph& g, const std::vector<nn::Node*>& losses,
                                const std::vector<nn::Node*>& log_vars);

struct ScheduleEntry {
    TaskId task;
    int batch_index;  // into that task's batch list
};

struct BatchSchedule {
    std::vector<ScheduleEntry> entries;
};

// One-by-one interleave starting with the argumentative task while both
// tasks have batches left; the larger task's surplus is appended at the
// end. Per-task batch order is a seeded shuffle.
BatchSchedule build_alternating_schedule(int n_arg_batches, int n_sarc_batches, uint64_t seed);

// Hard error on a task/batch mismatch before a dispatch step.
void check_dispatch(const ScheduleEntry& entry, TaskId batch_task);

// Audit record written per optimizer step, one JSON object per line.
struct StepLogEntry {
    int step;
    TaskId task;
    double loss;
    double log_var_arg;
    double log_var_sarc;
};

std::string step_log_to_json_line(const StepLogEntry& entry);

}  // namespace argsarc::mtl
