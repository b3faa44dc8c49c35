// binnet: waste-image classifier with transfer-learning strategies.
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "binnet/commands.hpp"
#include "binnet/errors.hpp"

namespace {

// 0 ok, 2 config error, 3 data/I-O error, 4 artifact mismatch
int run(int argc, char** argv) {
    CLI::App app{"waste image classification with hybrid transfer tuning"};
    app.require_subcommand(1);

    std::string config_path, checkpoint_path, image_path, data_dir, out_dir;
    std::string split_name = "test", class_name, task_name, res_spec = "32x32";
    double threshold = 0.9;
    std::uint64_t split_seed = 5, seed = 1;
    int n_per_class = 100;
    std::vector<std::string> strategies;
    std::vector<std::uint64_t> seeds;

    auto* train = app.add_subcommand("train", "train per a JSON run config");
    train->add_option("--config", config_path, "run config JSON")->required();

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a directory corpus");
    eval->add_option("--checkpoint", checkpoint_path)->required();
    eval->add_option("--data", data_dir, "directory-per-class PPM corpus")->required();
    eval->add_option("--split", split_name, "train|validation|test|all (default test)");
    eval->add_option("--split-seed", split_seed, "seed of the 50/25/25 split (default 5)");
    eval->add_option("--out", out_dir, "where to write metrics files");

    auto* infer = app.add_subcommand("infer", "classify one image and route it to a bin");
    infer->add_option("--checkpoint", checkpoint_path)->required();
    infer->add_option("--image", image_path, "P6 PPM image")->required();
    infer->add_option("--threshold", threshold, "routing threshold (default 0.9)");

    auto* explain = app.add_subcommand("explain", "render a localization heatmap");
    explain->add_option("--checkpoint", checkpoint_path)->required();
    explain->add_option("--image", image_path, "P6 PPM image")->required();
    explain->add_option("--class", class_name, "target class (default: predicted)");
    explain->add_option("--out", out_dir, "output directory (default explain-out)");

    auto* compare = app.add_subcommand("compare", "run several strategies across seeds");
    compare->add_option("--config", config_path, "run config JSON")->required();
    compare->add_option("--strategies", strategies, "comma-separated strategy list")
        ->required()
        ->delimiter(',');
    compare->add_option("--seeds", seeds, "comma-separated seed list")
        ->required()
        ->delimiter(',');

    auto* synth = app.add_subcommand("synth-data", "write a synthetic PPM corpus");
    synth->add_option("--task", task_name, "source|target")->required();
    synth->add_option("--out", out_dir)->required();
    synth->add_option("--n", n_per_class, "images per class (default 100)");
    synth->add_option("--res", res_spec, "HxW (default 32x32)");
    synth->add_option("--seed", seed, "generator seed (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (train->parsed())
        return binnet::cmd_train(binnet::load_run_config(config_path), std::cout);
    if (eval->parsed())
        return binnet::cmd_eval(checkpoint_path, data_dir, split_name, split_seed, out_dir,
                                std::cout);
    if (infer->parsed())
        return binnet::cmd_infer(checkpoint_path, image_path, threshold, std::cout);
    if (explain->parsed())
        return binnet::cmd_explain(checkpoint_path, image_path, class_name,
                                   out_dir.empty() ? "explain-out" : out_dir, std::cout);
    if (compare->parsed())
        return binnet::cmd_compare(binnet::load_run_config(config_path), strategies, seeds,
                                   std::cout);
    if (synth->parsed()) {
        const auto x = res_spec.find('x');
        if (x == std::string::npos)
            throw binnet::config_error("--res must look like 32x32 (HxW)");
        const std::int64_t h = std::stoll(res_spec.substr(0, x));
        const std::int64_t w = std::stoll(res_spec.substr(x + 1));
        return binnet::cmd_synth_data(task_name, out_dir, n_per_class, h, w, seed, std::cout);
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const binnet::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const binnet::mismatch_error& e) {
        std::cerr << "artifact mismatch: " << e.what() << "\n";
        return 4;
    } catch (const binnet::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const binnet::io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const binnet::format_error& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const binnet::corruption_error& e) {
        std::cerr << "corrupt file: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
