#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "binnet/augment.hpp"
#include "binnet/dataset.hpp"
#include "binnet/trainer.hpp"

namespace binnet {

struct DatasetConfig {
    enum class Kind { synthetic, directory };
    Kind kind = Kind::synthetic;
    // synthetic
    SyntheticTask task = SyntheticTask::target;
    int n_per_class = 100;
    std::int64_t res_h = 32, res_w = 32;
    std::uint64_t seed = 11;
    // directory
    std::string path;
    std::int64_t resize_h = 48, resize_w = 64;
    // shared
    std::uint64_t split_seed = 5;
};

// Where transfer knowledge comes from: an existing checkpoint, or a synthetic
// source task to pre-train on.
struct SourceConfig {
    std::string checkpoint; // non-empty selects checkpoint mode
    int n_per_class = 200;
    std::int64_t res_h = 32, res_w = 32;
    std::uint64_t seed = 1;
    std::uint64_t split_seed = 2;
    int epochs = 15;
};

struct ModelConfig {
    std::string architecture = "cnn-small";
    std::uint64_t init_seed = 7;
};

enum class Strategy { feature_extraction, full_finetune, hybrid, scratch };

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name); // throws config_error

struct TrainerConfig {
    Strategy strategy = Strategy::hybrid;
    OptimizerConfig opt;
    HybridSchedule schedule;
    std::uint64_t seed = 42;
};

struct RunConfig {
    DatasetConfig dataset;
    ModelConfig model;
    std::optional<SourceConfig> source;
    TrainerConfig trainer;
    AugmentConfig augment;
    double routing_threshold = 0.9;
    std::string output_dir = "out";

    void validate() const; // throws config_error
};

// Strict parse: unknown keys anywhere are configuration errors.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

} // namespace binnet
