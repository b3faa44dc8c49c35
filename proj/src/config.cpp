#include "binnet/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "binnet/errors.hpp"

using nlohmann::json;

namespace binnet {

namespace {

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw config_error("'" + section + "' must be a JSON object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw config_error("unknown key '" + key + "' in '" + section + "'");
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(std::string("invalid value for '") + key + "'");
    }
}

std::pair<std::int64_t, std::int64_t> get_hw(const json& obj, const char* key,
                                             std::int64_t h, std::int64_t w) {
    if (!obj.contains(key)) return {h, w};
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !v[1].is_number_integer())
        throw config_error(std::string("'") + key + "' must be a [height, width] pair");
    return {v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
}

DatasetConfig parse_dataset(const json& obj) {
    check_keys(obj, "dataset",
               {"kind", "task", "n_per_class", "resolution", "seed", "path", "resize",
                "split_seed"});
    DatasetConfig d;
    const std::string kind = get_or<std::string>(obj, "kind", "synthetic");
    if (kind == "synthetic")
        d.kind = DatasetConfig::Kind::synthetic;
    else if (kind == "directory")
        d.kind = DatasetConfig::Kind::directory;
    else
        throw config_error("dataset.kind must be 'synthetic' or 'directory'");

    const std::string task = get_or<std::string>(obj, "task", "target");
    if (task == "source")
        d.task = SyntheticTask::source;
    else if (task == "target")
        d.task = SyntheticTask::target;
    else
        throw config_error("dataset.task must be 'source' or 'target'");

    d.n_per_class = get_or<int>(obj, "n_per_class", d.n_per_class);
    std::tie(d.res_h, d.res_w) = get_hw(obj, "resolution", d.res_h, d.res_w);
    d.seed = get_or<std::uint64_t>(obj, "seed", d.seed);
    d.path = get_or<std::string>(obj, "path", d.path);
    std::tie(d.resize_h, d.resize_w) = get_hw(obj, "resize", d.resize_h, d.resize_w);
    d.split_seed = get_or<std::uint64_t>(obj, "split_seed", d.split_seed);

    if (d.kind == DatasetConfig::Kind::directory && d.path.empty())
        throw config_error("dataset.path is required for directory datasets");
    if (d.n_per_class < 1) throw config_error("dataset.n_per_class must be >= 1");
    return d;
}

SourceConfig parse_source(const json& obj) {
    check_keys(obj, "source", {"checkpoint", "synthetic"});
    SourceConfig s;
    s.checkpoint = get_or<std::string>(obj, "checkpoint", "");
    if (obj.contains("synthetic")) {
        const auto& syn = obj.at("synthetic");
        check_keys(syn, "source.synthetic",
                   {"n_per_class", "resolution", "seed", "split_seed", "epochs"});
        s.n_per_class = get_or<int>(syn, "n_per_class", s.n_per_class);
        std::tie(s.res_h, s.res_w) = get_hw(syn, "resolution", s.res_h, s.res_w);
        s.seed = get_or<std::uint64_t>(syn, "seed", s.seed);
        s.split_seed = get_or<std::uint64_t>(syn, "split_seed", s.split_seed);
        s.epochs = get_or<int>(syn, "epochs", s.epochs);
        if (s.epochs < 1) throw config_error("source.synthetic.epochs must be >= 1");
        if (!s.checkpoint.empty())
            throw config_error("source: give either a checkpoint or a synthetic block, not both");
    } else if (s.checkpoint.empty()) {
        throw config_error("source needs a checkpoint path or a synthetic block");
    }
    return s;
}

TrainerConfig parse_trainer(const json& obj) {
    check_keys(obj, "trainer",
               {"strategy", "base_lr", "momentum", "batch_size", "max_epochs", "seed",
                "schedule"});
    TrainerConfig t;
    t.strategy = parse_strategy(get_or<std::string>(obj, "strategy", "hybrid"));
    t.opt.base_lr = get_or<double>(obj, "base_lr", t.opt.base_lr);
    t.opt.momentum = get_or<double>(obj, "momentum", t.opt.momentum);
    t.opt.batch_size = get_or<int>(obj, "batch_size", t.opt.batch_size);
    t.opt.max_epochs = get_or<int>(obj, "max_epochs", t.opt.max_epochs);
    t.seed = get_or<std::uint64_t>(obj, "seed", t.seed);

    if (obj.contains("schedule")) {
        const auto& sched = obj.at("schedule");
        check_keys(sched, "trainer.schedule",
                   {"stage1", "unfreeze", "lr_decay_factor", "head_lr"});
        if (sched.contains("stage1")) {
            const auto& s1 = sched.at("stage1");
            check_keys(s1, "trainer.schedule.stage1", {"min_delta", "patience", "max_epochs"});
            t.schedule.stage1.min_delta = get_or<double>(s1, "min_delta", t.schedule.stage1.min_delta);
            t.schedule.stage1.patience = get_or<int>(s1, "patience", t.schedule.stage1.patience);
            t.schedule.stage1.max_epochs =
                get_or<int>(s1, "max_epochs", t.schedule.stage1.max_epochs);
        }
        if (sched.contains("unfreeze")) {
            const auto& uf = sched.at("unfreeze");
            check_keys(uf, "trainer.schedule.unfreeze", {"trigger", "epochs_per_stage"});
            const std::string trig = get_or<std::string>(uf, "trigger", "plateau");
            if (trig == "plateau")
                t.schedule.unfreeze.trigger = UnfreezeTrigger::plateau;
            else if (trig == "fixed_epochs")
                t.schedule.unfreeze.trigger = UnfreezeTrigger::fixed_epochs;
            else
                throw config_error("unfreeze.trigger must be 'plateau' or 'fixed_epochs'");
            t.schedule.unfreeze.epochs_per_stage =
                get_or<int>(uf, "epochs_per_stage", t.schedule.unfreeze.epochs_per_stage);
        }
        t.schedule.lr_decay_factor =
            get_or<double>(sched, "lr_decay_factor", t.schedule.lr_decay_factor);
        t.schedule.head_lr = get_or<double>(sched, "head_lr", t.schedule.head_lr);
    }
    return t;
}

AugmentConfig parse_augment(const json& obj) {
    check_keys(obj, "augment",
               {"rotation_max_deg", "zoom", "translate_max_frac", "hflip_prob", "seed"});
    AugmentConfig a;
    a.rotation_max_deg = get_or<double>(obj, "rotation_max_deg", a.rotation_max_deg);
    if (obj.contains("zoom")) {
        const auto& z = obj.at("zoom");
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
            throw config_error("augment.zoom must be a [lo, hi] pair");
        a.zoom_lo = z[0].get<double>();
        a.zoom_hi = z[1].get<double>();
    }
    a.translate_max_frac = get_or<double>(obj, "translate_max_frac", a.translate_max_frac);
    a.hflip_prob = get_or<double>(obj, "hflip_prob", a.hflip_prob);
    a.seed = get_or<std::uint64_t>(obj, "seed", 99);
    return a;
}

} // namespace

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::feature_extraction: return "feature-extraction";
        case Strategy::full_finetune: return "full-finetune";
        case Strategy::hybrid: return "hybrid";
        case Strategy::scratch: return "scratch";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    if (name == "feature-extraction") return Strategy::feature_extraction;
    if (name == "full-finetune") return Strategy::full_finetune;
    if (name == "hybrid") return Strategy::hybrid;
    if (name == "scratch") return Strategy::scratch;
    throw config_error("unknown strategy '" + name +
                       "' (expected feature-extraction, full-finetune, hybrid or scratch)");
}

void RunConfig::validate() const {
    if (routing_threshold < 0 || routing_threshold > 1)
        throw config_error("routing.threshold must be in [0,1]");
    if (output_dir.empty()) throw config_error("output.dir must not be empty");
    trainer.opt.validate();
    if (trainer.opt.base_lr <= 0) throw config_error("trainer.base_lr must be positive");
    trainer.schedule.validate();
    if (trainer.schedule.head_lr <= 0)
        throw config_error("trainer.schedule.head_lr must be positive");
    augment.validate();
    const bool needs_source = trainer.strategy == Strategy::hybrid ||
                              trainer.strategy == Strategy::feature_extraction ||
                              trainer.strategy == Strategy::full_finetune;
    if (needs_source && !source)
        throw config_error("strategy '" + strategy_name(trainer.strategy) +
                           "' needs a source section (checkpoint or synthetic pretrain)");
}

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"dataset", "model", "source", "trainer", "augment", "routing", "output"});

    RunConfig cfg;
    if (root.contains("dataset")) cfg.dataset = parse_dataset(root.at("dataset"));
    if (root.contains("model")) {
        const auto& m = root.at("model");
        check_keys(m, "model", {"architecture", "init_seed"});
        cfg.model.architecture = get_or<std::string>(m, "architecture", cfg.model.architecture);
        cfg.model.init_seed = get_or<std::uint64_t>(m, "init_seed", cfg.model.init_seed);
    }
    if (root.contains("source")) cfg.source = parse_source(root.at("source"));
    if (root.contains("trainer")) cfg.trainer = parse_trainer(root.at("trainer"));
    if (root.contains("augment")) cfg.augment = parse_augment(root.at("augment"));
    if (root.contains("routing")) {
        const auto& r = root.at("routing");
        check_keys(r, "routing", {"threshold"});
        cfg.routing_threshold = get_or<double>(r, "threshold", cfg.routing_threshold);
    }
    if (root.contains("output")) {
        const auto& o = root.at("output");
        check_keys(o, "output", {"dir"});
        cfg.output_dir = get_or<std::string>(o, "dir", cfg.output_dir);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

} // namespace binnet
