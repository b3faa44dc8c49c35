#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "binnet/config.hpp"
#include "binnet/metrics.hpp"

namespace binnet {

// Everything a single training run produces, before artifacts hit disk.
struct PipelineResult {
    Network net;
    TrainHistory history;
    DatasetSplit split;
    ClassCatalog catalog;
    ConfusionMatrix test_confusion;
    MetricsReport test_report;
};

// dataset -> split -> (source acquisition) -> strategy -> test metrics.
PipelineResult run_pipeline(const RunConfig& cfg, std::ostream& log);

std::vector<int> predict(const Network& net, const std::vector<LabeledImage>& images,
                         int batch_size);

int cmd_train(const RunConfig& cfg, std::ostream& log);
int cmd_eval(const std::string& checkpoint_path, const std::string& data_dir,
             const std::string& split_name, std::uint64_t split_seed,
             const std::string& out_dir, std::ostream& log);
int cmd_infer(const std::string& checkpoint_path, const std::string& image_path,
              double threshold, std::ostream& out);
int cmd_explain(const std::string& checkpoint_path, const std::string& image_path,
                const std::string& class_name, const std::string& out_dir,
                std::ostream& log);
int cmd_compare(const RunConfig& cfg, const std::vector<std::string>& strategies,
                const std::vector<std::uint64_t>& seeds, std::ostream& log);
int cmd_synth_data(const std::string& task, const std::string& out_dir, int n_per_class,
                   std::int64_t res_h, std::int64_t res_w, std::uint64_t seed,
                   std::ostream& log);

} // namespace binnet
