// Acceptance suite: one pass/fail line per criterion, exit 1 on any failure.
//
// Usage: binnet_acceptance --cli <path-to-binnet-binary> --workdir <scratch>
//
// Criteria 8 and 9 drive the CLI binary itself; everything else goes through
// the library. The whole suite is seeded and deterministic.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "binnet/augment.hpp"
#include "binnet/commands.hpp"
#include "binnet/dataset.hpp"
#include "binnet/errors.hpp"
#include "binnet/explain.hpp"
#include "binnet/metrics.hpp"
#include "binnet/nn.hpp"
#include "binnet/rng.hpp"
#include "binnet/routing.hpp"
#include "binnet/trainer.hpp"
#include "gradcheck.hpp"
#include "toy_net.hpp"

namespace fs = std::filesystem;
using namespace binnet;
using clk = std::chrono::steady_clock;

namespace {

struct Context {
    std::string cli;
    fs::path work;
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define REQUIRE_ACC(cond, msg)                                            \
    do {                                                                  \
        if (!(cond)) throw Failure(std::string("check failed: ") + msg);  \
    } while (0)

int run_cli(const Context& ctx, const std::string& args) {
    const std::string cmd = ctx.cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) throw Failure("could not launch CLI");
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    throw Failure("CLI terminated abnormally");
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Failure("cannot write " + path.string());
}

std::vector<std::string> split_str(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// --------------------------------------------------------------------------
// criterion 1: fidelity statement
// --------------------------------------------------------------------------
void criterion_fidelity(Context&) {
    std::cout << "        note: the published 97.0% TrashNet accuracy needs an\n"
                 "        ImageNet-pretrained DenseNet and the full photo corpus;\n"
                 "        this desk-scale build substitutes the property checks below\n";
}

// --------------------------------------------------------------------------
// criterion 2: gradient oracle on >= 20 random networks, 64-bit mode
// --------------------------------------------------------------------------
void criterion_gradients(Context&) {
    const auto t0 = clk::now();
    std::int64_t params = 0;
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto net = gradcheck::TinyNet::random(0xACC00000ULL + seed);
        const auto result = gradcheck::check_net(net, 1e-5, 1e-6, 1e-8);
        params += result.params;
        worst = std::max(worst, result.worst_rel);
        REQUIRE_ACC(result.pass, "gradient mismatch on net seed " + std::to_string(seed) +
                                     " worst rel err " + std::to_string(result.worst_rel));
    }
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    std::printf("        20 nets, %lld parameters, worst rel err %.2e, %.1fs\n",
                static_cast<long long>(params), worst, secs);
    REQUIRE_ACC(secs < 120.0, "gradient oracle exceeded 2 minutes");
}

// --------------------------------------------------------------------------
// criterion 3: freezing invariant over a full feature-extraction run
// --------------------------------------------------------------------------
std::uint64_t tensor_bytes_hash(const Tensor& t) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::int64_t i = 0; i < t.size(); ++i) {
        std::uint32_t bits;
        float v = t[i];
        std::memcpy(&bits, &v, 4);
        h = (h ^ bits) * 1099511628211ULL;
    }
    return h;
}

void criterion_freezing(Context&) {
    const auto t0 = clk::now();
    auto ds = synthesize_dataset(SyntheticTask::target, 20, 16, 16, 31);
    auto split = stratified_split(ds.images, 32);
    auto net = build_network("cnn-small", {3, 16, 16}, ds.catalog, 33);

    std::vector<std::uint64_t> before;
    for (const auto& g : net.groups)
        if (g.kind != GroupKind::dense_head)
            for (const auto& p : g.params) before.push_back(tensor_bytes_hash(p));

    OptimizerConfig opt;
    opt.batch_size = 16;
    PlateauRule stop;
    stop.max_epochs = 12;
    AugmentConfig augment;
    augment.seed = 34;
    train_feature_extraction(net, split, opt, augment, stop, 35);

    std::vector<std::uint64_t> after;
    for (const auto& g : net.groups)
        if (g.kind != GroupKind::dense_head)
            for (const auto& p : g.params) after.push_back(tensor_bytes_hash(p));
    REQUIRE_ACC(before == after, "non-head parameters changed during feature extraction");

    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    std::printf("        %zu frozen tensors bitwise unchanged, %.1fs\n", before.size(), secs);
    REQUIRE_ACC(secs < 60.0, "freezing check exceeded 1 minute");
}

// --------------------------------------------------------------------------
// criterion 4: hybrid schedule invariants, checked from the history CSV alone
// --------------------------------------------------------------------------
void criterion_hybrid_schedule(Context& ctx) {
    const double head_lr = 0.01, decay = 2.0;
    auto ds = synthesize_dataset(SyntheticTask::target, 16, 16, 16, 41);
    auto split = stratified_split(ds.images, 42);
    auto source = synthesize_dataset(SyntheticTask::source, 16, 16, 16, 43);
    auto net = build_network("cnn-medium", {3, 16, 16}, source.catalog, 44);
    replace_head(net, ds.catalog, 45);

    OptimizerConfig opt;
    opt.batch_size = 16;
    opt.max_epochs = 3;
    HybridSchedule schedule;
    schedule.stage1.max_epochs = 3;
    schedule.stage1.patience = 1;
    schedule.head_lr = head_lr;
    schedule.lr_decay_factor = decay;
    AugmentConfig augment;
    augment.seed = 46;
    const auto history = hybrid_tune(net, split, opt, schedule, augment, 47);

    const fs::path csv_path = ctx.work / "hybrid-history.csv";
    spit(csv_path, history.to_csv());

    // everything below reads only the CSV
    const auto lines = split_str(slurp(csv_path), '\n');
    REQUIRE_ACC(lines.size() > 2, "history CSV is empty");
    const auto header = split_str(lines[0], ',');
    REQUIRE_ACC(header.size() > 8, "history CSV header too short");
    const int n_groups = static_cast<int>(header.size()) - 8;
    const int max_depth = n_groups - 1;

    std::set<int> previous;
    int prev_epoch = 0;
    std::set<int> final_set;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto cells = split_str(lines[li], ',');
        REQUIRE_ACC(cells.size() == header.size(), "ragged CSV row");
        const int epoch = std::stoi(cells[0]);
        REQUIRE_ACC(epoch == prev_epoch + 1, "epochs not strictly increasing");
        prev_epoch = epoch;

        std::set<int> current;
        for (const auto& d : split_str(cells[7], ';'))
            if (!d.empty()) current.insert(std::stoi(d));
        REQUIRE_ACC(std::stoul(cells[6]) == current.size(), "unfrozen_count disagrees");

        // (a) monotone growth
        for (int d : previous)
            REQUIRE_ACC(current.count(d), "a group was re-frozen");
        // (b) strictly head-downward releases
        if (!previous.empty() && current.size() > previous.size()) {
            REQUIRE_ACC(current.size() == previous.size() + 1, "more than one unfreeze at once");
            std::vector<int> fresh;
            for (int d : current)
                if (!previous.count(d)) fresh.push_back(d);
            REQUIRE_ACC(fresh.size() == 1 && fresh[0] == *previous.begin() - 1,
                        "unfreeze order is not head-downward");
        }
        if (previous.empty())
            REQUIRE_ACC(current == std::set<int>{max_depth}, "stage 1 must train the head only");

        // (c) recorded lrs match head_lr / decay^(max_depth - d)
        for (int d = 0; d < n_groups; ++d) {
            const double lr = std::stod(cells[static_cast<std::size_t>(8 + d)]);
            const double expected =
                current.count(d) ? head_lr / std::pow(decay, max_depth - d) : 0.0;
            REQUIRE_ACC(std::abs(lr - expected) <= 1e-12 * std::max(1.0, expected),
                        "recorded lr deviates from the schedule at epoch " +
                            std::to_string(epoch) + " depth " + std::to_string(d));
        }
        previous = current;
        final_set = current;
    }
    std::set<int> all;
    for (int d = 0; d < n_groups; ++d) all.insert(d);
    REQUIRE_ACC(final_set == all, "trajectory does not end with all groups unfrozen");
    std::printf("        %d epochs over %d groups, trajectory and lrs verified from CSV\n",
                prev_epoch, n_groups);
}

// --------------------------------------------------------------------------
// criterion 5: strategy ordering on the synthetic transfer benchmark
// --------------------------------------------------------------------------
void criterion_strategy_ordering(Context& ctx) {
    const auto t0 = clk::now();
    RunConfig cfg = parse_run_config(R"({
        "dataset": {"kind": "synthetic", "task": "target", "n_per_class": 100,
                     "resolution": [32, 32]},
        "source": {"synthetic": {"n_per_class": 200, "resolution": [32, 32]}},
        "trainer": {"strategy": "hybrid"}
    })");
    cfg.output_dir = (ctx.work / "benchmark").string();

    std::ofstream log(ctx.work / "benchmark.log");
    cmd_compare(cfg, {"hybrid", "feature-extraction", "scratch"}, {1, 2, 3, 4, 5}, log);

    std::map<std::string, double> means;
    for (const auto& line : split_str(slurp(fs::path(cfg.output_dir) / "comparison.csv"), '\n')) {
        const auto cells = split_str(line, ',');
        if (cells.size() >= 3 && cells[1] == "mean")
            means[cells[0]] = std::stod(cells[2]);
    }
    REQUIRE_ACC(means.size() == 3, "expected 3 aggregate rows");
    const double hybrid = means.at("hybrid");
    const double fe = means.at("feature-extraction");
    const double scratch = means.at("scratch");
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    std::printf("        mean accuracy: hybrid %.3f, feature-extraction %.3f, scratch %.3f"
                " (%.0fs)\n", hybrid, fe, scratch, secs);
    REQUIRE_ACC(hybrid >= fe, "hybrid mean accuracy below feature-extraction");
    REQUIRE_ACC(hybrid >= scratch, "hybrid mean accuracy below train-from-scratch");
    REQUIRE_ACC(hybrid > 1.0 / 6.0 + 0.30, "hybrid mean accuracy not clear of chance");
    REQUIRE_ACC(secs < 1800.0, "benchmark exceeded 30 minutes");
}

// --------------------------------------------------------------------------
// criterion 6: metrics oracle, exact recount on 100 random instances
// --------------------------------------------------------------------------
void criterion_metrics(Context&) {
    Rng rng(0x6006);
    for (int instance = 0; instance < 100; ++instance) {
        const int classes = 2 + static_cast<int>(rng.below(6));
        const int n = 1 + static_cast<int>(rng.below(200));
        std::vector<std::string> catalog;
        for (int c = 0; c < classes; ++c) catalog.push_back("c" + std::to_string(c));
        std::vector<int> truths, preds;
        for (int i = 0; i < n; ++i) {
            truths.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))));
            preds.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))));
        }
        const auto report = compute_metrics(confusion_matrix(truths, preds, catalog));

        std::uint64_t trace = 0;
        for (int c = 0; c < classes; ++c) {
            std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
            for (int i = 0; i < n; ++i) {
                const bool t = truths[static_cast<std::size_t>(i)] == c;
                const bool p = preds[static_cast<std::size_t>(i)] == c;
                tp += t && p;
                fp += !t && p;
                fn += t && !p;
                tn += !t && !p;
            }
            trace += tp;
            REQUIRE_ACC(tp + fp + fn + tn == static_cast<std::uint64_t>(n), "recount broken");
            const auto& cm = report.per_class[static_cast<std::size_t>(c)];
            const double ep = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
            const double er = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
            const double ef = ep + er == 0 ? 0.0 : 2 * ep * er / (ep + er);
            REQUIRE_ACC(cm.precision == ep, "precision recount mismatch");
            REQUIRE_ACC(cm.recall == er, "recall recount mismatch");
            REQUIRE_ACC(cm.f1 == ef, "f1 recount mismatch");
            REQUIRE_ACC(cm.support == tp + fn, "support recount mismatch");
        }
        REQUIRE_ACC(report.accuracy == double(trace) / double(n), "accuracy recount mismatch");
        REQUIRE_ACC(report.weighted_recall == report.accuracy,
                    "weighted recall != accuracy identity broke");
    }
    std::printf("        100 instances recounted exactly, identity held on each\n");
}

// --------------------------------------------------------------------------
// criterion 7: the 50/25/25 floor rule and partition properties
// --------------------------------------------------------------------------
void criterion_split(Context&) {
    auto make_class = [](int label, int n, std::vector<LabeledImage>& out) {
        for (int i = 0; i < n; ++i) {
            LabeledImage img;
            img.pixels = Tensor::zeros({3, 2, 2});
            img.label = label;
            img.source_id = "c" + std::to_string(label) + "/" + std::to_string(i);
            out.push_back(std::move(img));
        }
    };

    std::vector<LabeledImage> other;
    make_class(0, 137, other);
    const auto split137 = stratified_split(other, 7);
    REQUIRE_ACC(split137.train.size() == 68 && split137.validation.size() == 34 &&
                    split137.test.size() == 35,
                "n=137 did not split (68,34,35)");

    Rng rng(0x5717);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<LabeledImage> corpus;
        const int classes = 1 + static_cast<int>(rng.below(6));
        std::map<int, int> sizes;
        for (int c = 0; c < classes; ++c) {
            sizes[c] = 1 + static_cast<int>(rng.below(60));
            make_class(c, sizes[c], corpus);
        }
        const auto split = stratified_split(corpus, rng.next_u64());

        std::set<std::string> seen;
        for (const auto* part : {&split.train, &split.validation, &split.test})
            for (const auto& img : *part)
                REQUIRE_ACC(seen.insert(img.source_id).second, "splits overlap");
        REQUIRE_ACC(seen.size() == corpus.size(), "splits do not cover the corpus");

        for (const auto& [label, n] : sizes) {
            int tr = 0, va = 0, te = 0;
            for (const auto& img : split.train) tr += img.label == label;
            for (const auto& img : split.validation) va += img.label == label;
            for (const auto& img : split.test) te += img.label == label;
            REQUIRE_ACC(tr == n / 2, "train floor rule violated");
            REQUIRE_ACC(va == n / 4, "validation floor rule violated");
            REQUIRE_ACC(te == n - n / 2 - n / 4, "test remainder violated");
        }
    }
    std::printf("        (68,34,35) at n=137; 50 random corpora partitioned exactly\n");
}

// --------------------------------------------------------------------------
// criterion 8: bitwise-deterministic CLI training
// --------------------------------------------------------------------------
std::string determinism_config(const fs::path& out_dir) {
    std::ostringstream cfg;
    cfg << R"({
        "dataset": {"kind": "synthetic", "task": "target", "n_per_class": 24,
                     "resolution": [16, 16], "seed": 81, "split_seed": 82},
        "model": {"architecture": "cnn-small", "init_seed": 83},
        "source": {"synthetic": {"n_per_class": 24, "resolution": [16, 16],
                                   "seed": 84, "split_seed": 85, "epochs": 2}},
        "trainer": {"strategy": "hybrid", "batch_size": 16, "max_epochs": 2, "seed": 86,
                     "schedule": {"stage1": {"min_delta": 0.001, "patience": 1, "max_epochs": 2}}},
        "augment": {"seed": 87},
        "output": {"dir": ")" << out_dir.generic_string() << R"("}
    })";
    return cfg.str();
}

void criterion_determinism(Context& ctx) {
    const fs::path out_dir = ctx.work / "det-run";
    const fs::path config = ctx.work / "det.json";
    spit(config, determinism_config(out_dir));

    REQUIRE_ACC(run_cli(ctx, "train --config " + config.string()) == 0, "first train failed");
    const std::string ckpt1 = slurp(out_dir / "checkpoint.wnet");
    const std::string hist1 = slurp(out_dir / "history.csv");

    REQUIRE_ACC(run_cli(ctx, "train --config " + config.string()) == 0, "second train failed");
    REQUIRE_ACC(slurp(out_dir / "checkpoint.wnet") == ckpt1,
                "checkpoints differ between identical runs");
    REQUIRE_ACC(slurp(out_dir / "history.csv") == hist1,
                "history CSVs differ between identical runs");
    std::printf("        checkpoint %zu bytes and history identical across reruns\n",
                ckpt1.size());
}

// --------------------------------------------------------------------------
// criterion 9: checkpoint round-trip and rejection exit codes
// --------------------------------------------------------------------------
void criterion_checkpoint(Context& ctx) {
    auto net = build_network("cnn-small", {3, 16, 16},
                             {"a", "b", "c", "d", "e", "f"}, 91);
    const fs::path p1 = ctx.work / "rt1.wnet";
    const fs::path p2 = ctx.work / "rt2.wnet";
    save_checkpoint(net, p1.string(), "h\n1\n");
    std::string history;
    Network loaded = load_checkpoint(p1.string(), &history);
    save_checkpoint(loaded, p2.string(), history);
    REQUIRE_ACC(slurp(p1) == slurp(p2), "save -> load -> save changed bytes");

    // a probe image for the CLI runs
    const fs::path img = ctx.work / "probe.ppm";
    write_ppm(img.string(), Tensor::full({3, 16, 16}, 0.5f));
    REQUIRE_ACC(run_cli(ctx, "infer --checkpoint " + p1.string() + " --image " + img.string()) == 0,
                "valid checkpoint rejected");

    std::string corrupted = slurp(p1);
    corrupted[0] = 'X';
    const fs::path bad_magic = ctx.work / "bad-magic.wnet";
    spit(bad_magic, corrupted);
    REQUIRE_ACC(run_cli(ctx, "infer --checkpoint " + bad_magic.string() + " --image " +
                                 img.string()) == 3,
                "bad magic must exit 3");

    const fs::path truncated = ctx.work / "truncated.wnet";
    spit(truncated, slurp(p1).substr(0, slurp(p1).size() / 3));
    REQUIRE_ACC(run_cli(ctx, "infer --checkpoint " + truncated.string() + " --image " +
                                 img.string()) == 3,
                "truncated checkpoint must exit 3");
    std::printf("        round-trip bytes identical; corrupt files exit 3\n");
}

// --------------------------------------------------------------------------
// criterion 10: augmentation identity, involution, flip frequency
// --------------------------------------------------------------------------
void criterion_augmentation(Context&) {
    Rng rng(0xA06);
    Tensor img({3, 14, 10});
    for (std::int64_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<float>(rng.next_double());

    const Tensor identity = apply_transform(img, TransformParams{});
    REQUIRE_ACC(std::memcmp(identity.data(), img.data(),
                            static_cast<std::size_t>(img.size()) * 4) == 0,
                "identity transform is not bitwise identity");

    TransformParams flip;
    flip.hflip = true;
    const Tensor twice = apply_transform(apply_transform(img, flip), flip);
    REQUIRE_ACC(std::memcmp(twice.data(), img.data(),
                            static_cast<std::size_t>(img.size()) * 4) == 0,
                "hflip twice is not the identity");

    AugmentConfig cfg; // defaults: hflip_prob 0.5
    Rng draws(0xF11F);
    int flips = 0;
    for (int i = 0; i < 1000; ++i) flips += draw_transform(cfg, 14, 10, draws).hflip;
    const double freq = flips / 1000.0;
    std::printf("        flip frequency %.3f over 1000 draws\n", freq);
    REQUIRE_ACC(freq >= 0.44 && freq <= 0.56, "flip frequency outside [0.44, 0.56]");
}

// --------------------------------------------------------------------------
// criterion 11: grad-cam vs occlusion on the discriminative-pixel toy net
// --------------------------------------------------------------------------
void criterion_localization(Context&) {
    auto net = toynet::hot_pixel_net(12, 12);
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(0x10CA1ULL + seed);
        Tensor img = Tensor::full({3, 12, 12}, 0.05f);
        const auto y = 2 + static_cast<std::int64_t>(rng.below(8));
        const auto x = 2 + static_cast<std::int64_t>(rng.below(8));
        img[(1 * 12 + y) * 12 + x] = 1.0f;
        const auto cam = toynet::heatmap_argmax(grad_cam(net, img, 0));
        const auto occ = toynet::occlusion_argmax(net, img, 0);
        if (std::llabs(cam.first - occ.first) <= 1 && std::llabs(cam.second - occ.second) <= 1)
            ++hits;
    }
    std::printf("        argmax agreement %d/10 within 1 pixel\n", hits);
    REQUIRE_ACC(hits >= 9, "localization agreed on fewer than 9 of 10 instances");
}

// --------------------------------------------------------------------------
// criterion 12: strict-threshold waste routing
// --------------------------------------------------------------------------
void criterion_routing(Context&) {
    const std::vector<std::string>& catalog = waste_catalog();

    std::vector<double> confident = {0.95, 0.01, 0.01, 0.01, 0.01, 0.01};
    REQUIRE_ACC(route_waste(confident, catalog, 0.9).bin == "cardboard",
                "0.95 at threshold 0.9 must route to the class bin");

    std::vector<double> boundary = {0.9, 0.02, 0.02, 0.02, 0.02, 0.02};
    REQUIRE_ACC(route_waste(boundary, catalog, 0.9).bin == kHumanSortBin,
                "probability equal to the threshold must go to human sorting");

    std::vector<double> weak(6, 1.0 / 6.0);
    REQUIRE_ACC(route_waste(weak, catalog, 0.9).bin == kHumanSortBin,
                "sub-threshold probability must go to human sorting");
    REQUIRE_ACC(route_waste(weak, catalog, 0.0).bin == "cardboard",
                "threshold 0 must route to the argmax bin");
    std::printf("        strict > threshold semantics verified incl. the boundary case\n");
}

} // namespace

int main(int argc, char** argv) {
    Context ctx;
    ctx.work = fs::temp_directory_path() / "binnet-acceptance";
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli")
            ctx.cli = argv[i + 1];
        else if (flag == "--workdir")
            ctx.work = argv[i + 1];
    }
    if (ctx.cli.empty()) {
        std::cerr << "usage: binnet_acceptance --cli <binnet binary> [--workdir <dir>]\n";
        return 2;
    }
    std::error_code ec;
    fs::remove_all(ctx.work, ec);
    fs::create_directories(ctx.work, ec);
    if (ec) {
        std::cerr << "cannot create workdir " << ctx.work << "\n";
        return 2;
    }

    struct Criterion {
        int id;
        const char* name;
        std::function<void(Context&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "paper-scale fidelity statement (desk-scale substitution)", criterion_fidelity},
        {2, "gradient oracle vs central finite differences", criterion_gradients},
        {3, "freezing invariant over a feature-extraction run", criterion_freezing},
        {4, "hybrid schedule invariants from the history CSV", criterion_hybrid_schedule},
        {5, "strategy ordering on the synthetic transfer benchmark",
         criterion_strategy_ordering},
        {6, "metrics oracle: exact brute-force recount", criterion_metrics},
        {7, "stratified 50/25/25 floor rule and partition", criterion_split},
        {8, "bitwise-deterministic CLI training", criterion_determinism},
        {9, "checkpoint round-trip and rejection exit codes", criterion_checkpoint},
        {10, "augmentation identity, involution, flip frequency", criterion_augmentation},
        {11, "grad-cam argmax vs occlusion oracle", criterion_localization},
        {12, "strict-threshold waste routing", criterion_routing},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            criterion.run(ctx);
            std::printf("[PASS] criterion %2d: %s\n", criterion.id, criterion.name);
        } catch (const std::exception& e) {
            std::printf("[FAIL] criterion %2d: %s - %s\n", criterion.id, criterion.name,
                        e.what());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all 12 criteria passed\n");
    return 0;
}
