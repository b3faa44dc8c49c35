#include "binnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "binnet/errors.hpp"
#include "binnet/rng.hpp"

namespace binnet {

void OptimizerConfig::validate() const {
    if (base_lr < 0) throw config_error("base_lr must not be negative");
    if (momentum < 0 || momentum >= 1) throw config_error("momentum must be in [0,1)");
    if (batch_size < 1) throw config_error("batch_size must be positive");
    if (max_epochs < 1) throw config_error("max_epochs must be >= 1");
}

void PlateauRule::validate() const {
    if (min_delta < 0) throw config_error("plateau min_delta must be >= 0");
    if (patience < 1) throw config_error("plateau patience must be >= 1");
    if (max_epochs < 1) throw config_error("plateau max_epochs must be >= 1");
}

void HybridSchedule::validate() const {
    stage1.validate();
    if (lr_decay_factor <= 1) throw config_error("lr_decay_factor must be > 1");
    if (head_lr < 0) throw config_error("head_lr must not be negative");
    if (unfreeze.trigger == UnfreezeTrigger::fixed_epochs && unfreeze.epochs_per_stage < 1)
        throw config_error("epochs_per_stage must be >= 1");
}

std::map<int, double> discriminative_lrs(double head_lr, double decay,
                                         const std::vector<int>& unfrozen_depths,
                                         int max_depth) {
    std::map<int, double> lrs;
    for (int d : unfrozen_depths)
        lrs[d] = head_lr / std::pow(decay, static_cast<double>(max_depth - d));
    return lrs;
}

bool PlateauDetector::observe(double loss) {
    if (!has_best_ || best_ - loss >= min_delta_) {
        has_best_ = true;
        best_ = loss;
        streak_ = 0;
        return false;
    }
    ++streak_;
    return streak_ >= patience_;
}

void PlateauDetector::reset() {
    has_best_ = false;
    streak_ = 0;
}

bool plateau_detect(const std::vector<double>& losses, double min_delta, int patience) {
    PlateauDetector det(min_delta, patience);
    bool fired = false;
    for (double l : losses) fired = det.observe(l) || fired;
    return fired;
}

std::vector<int> unfrozen_depths(const Network& net) {
    std::vector<int> depths;
    for (const auto& g : net.groups)
        if (!g.frozen) depths.push_back(g.depth_index);
    std::sort(depths.begin(), depths.end());
    return depths;
}

void sgd_step(Network& net, const std::vector<std::vector<Tensor>>& gradients,
              const std::map<int, double>& per_group_lrs, double momentum,
              MomentumState& state) {
    if (gradients.size() != net.groups.size())
        throw dimension_error("gradient group count does not match network");
    for (std::size_t gi = 0; gi < net.groups.size(); ++gi) {
        auto& group = net.groups[gi];
        if (group.frozen) continue;
        const auto it = per_group_lrs.find(group.depth_index);
        if (it == per_group_lrs.end())
            throw config_error("no learning rate configured for unfrozen group '" +
                               group.name + "'");
        const auto lr = static_cast<float>(it->second);
        const auto mom = static_cast<float>(momentum);

        const auto& grads = gradients[gi];
        if (grads.size() != group.params.size())
            throw dimension_error("gradient count does not match parameters of group '" +
                                  group.name + "'");
        auto& vel = state.velocity[group.depth_index];
        if (vel.empty())
            for (const auto& p : group.params) vel.push_back(Tensor::zeros(p.shape()));
        for (std::size_t pi = 0; pi < group.params.size(); ++pi) {
            Tensor& p = group.params[pi];
            Tensor& v = vel[pi];
            const Tensor& g = grads[pi];
            if (!g.same_shape(p))
                throw dimension_error("gradient shape mismatch in group '" + group.name + "'");
            for (std::int64_t i = 0; i < p.size(); ++i) {
                v[i] = mom * v[i] - lr * g[i];
                p[i] += v[i];
            }
        }
    }
}

namespace {

Tensor assemble_batch(const std::vector<const Tensor*>& images) {
    const auto& first = *images.front();
    Tensor batch({static_cast<std::int64_t>(images.size()), first.dim(0), first.dim(1),
                  first.dim(2)});
    const std::int64_t stride = first.size();
    for (std::size_t i = 0; i < images.size(); ++i)
        std::copy_n(images[i]->data(), stride, batch.data() + static_cast<std::int64_t>(i) * stride);
    return batch;
}

int argmax_row(const float* row, std::int64_t count) {
    int best = 0;
    for (std::int64_t i = 1; i < count; ++i)
        if (row[i] > row[best]) best = static_cast<int>(i);
    return best;
}

struct EpochStats {
    double loss = 0;
    double accuracy = 0;
};

// One pass over the training split: seeded shuffle, per-image augmentation,
// forward/backward/step per batch.
EpochStats train_one_epoch(Network& net, const std::vector<LabeledImage>& train,
                           const OptimizerConfig& opt, const AugmentConfig& augment,
                           const std::map<int, double>& lrs, MomentumState& state,
                           std::uint64_t seed, int epoch) {
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(Rng::derive(Rng::derive(seed, 0xB41C4ULL), static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    const bool augment_active = augment.rotation_max_deg > 0 || augment.zoom_lo != 1.0 ||
                                augment.zoom_hi != 1.0 || augment.translate_max_frac > 0 ||
                                augment.hflip_prob > 0;

    double loss_sum = 0;
    std::int64_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(opt.batch_size)) {
        const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opt.batch_size));
        std::vector<Tensor> augmented;
        std::vector<const Tensor*> views;
        std::vector<int> labels;
        augmented.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) {
            const auto& img = train[order[i]];
            if (augment_active) {
                Rng rng(Rng::derive(Rng::derive(augment.seed, static_cast<std::uint64_t>(epoch)),
                                    static_cast<std::uint64_t>(order[i])));
                augmented.push_back(random_augment(img.pixels, augment, rng));
            } else {
                augmented.push_back(img.pixels);
            }
            labels.push_back(img.label);
        }
        for (const auto& t : augmented) views.push_back(&t);

        auto graph = forward_graph(net, assemble_batch(views));
        auto sce = softmax_cross_entropy(graph.logits, labels);
        backward(sce.loss);

        const std::int64_t n = static_cast<std::int64_t>(labels.size());
        const std::int64_t classes = graph.logits->value.dim(1);
        loss_sum += static_cast<double>(sce.loss->value[0]) * static_cast<double>(n);
        for (std::int64_t r = 0; r < n; ++r)
            if (argmax_row(graph.logits->value.data() + r * classes, classes) ==
                labels[static_cast<std::size_t>(r)])
                ++correct;

        std::vector<std::vector<Tensor>> grads(net.groups.size());
        for (std::size_t gi = 0; gi < net.groups.size(); ++gi)
            if (!net.groups[gi].frozen)
                for (auto& pvar : graph.group_params[gi])
                    grads[gi].push_back(std::move(pvar->grad));
        sgd_step(net, grads, lrs, opt.momentum, state);
    }

    EpochStats stats;
    stats.loss = loss_sum / static_cast<double>(train.size());
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    return stats;
}

// Early-stopping restoration: every strategy hands back the weights of its
// best validation-loss epoch (first epoch wins ties), not whatever the last
// step left behind.
struct BestTracker {
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<std::vector<Tensor>> params;

    void observe(const Network& net, double val_loss) {
        if (val_loss >= best_loss) return;
        best_loss = val_loss;
        params.clear();
        for (const auto& g : net.groups) params.push_back(g.params);
    }

    void restore(Network& net) const {
        if (params.empty()) return;
        for (std::size_t g = 0; g < net.groups.size(); ++g)
            net.groups[g].params = params[g];
    }
};

std::vector<double> group_lr_row(const Network& net, const std::map<int, double>& lrs) {
    std::vector<double> row(net.groups.size(), 0.0);
    for (const auto& [depth, lr] : lrs)
        if (depth >= 0 && static_cast<std::size_t>(depth) < row.size()) row[static_cast<std::size_t>(depth)] = lr;
    return row;
}

void check_split(const Network& net, const DatasetSplit& split) {
    if (net.groups.size() < 2) throw config_error("network needs at least 2 groups to train");
    if (split.train.empty()) throw data_error("training split is empty");
    if (split.validation.empty()) throw data_error("validation split is empty");
}

EpochRecord make_record(int epoch, const char* stage, const EpochStats& train_stats,
                        const EvalStats& val_stats, const Network& net,
                        const std::map<int, double>& lrs) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.stage = stage;
    rec.train_loss = train_stats.loss;
    rec.train_accuracy = train_stats.accuracy;
    rec.val_loss = val_stats.loss;
    rec.val_accuracy = val_stats.accuracy;
    rec.unfrozen = unfrozen_depths(net);
    rec.group_lrs = group_lr_row(net, lrs);
    return rec;
}

} // namespace

EvalStats evaluate(const Network& net, const std::vector<LabeledImage>& images,
                   int batch_size) {
    if (images.empty()) throw data_error("cannot evaluate an empty split");
    double loss_sum = 0;
    std::int64_t correct = 0;
    for (std::size_t start = 0; start < images.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(images.size(), start + static_cast<std::size_t>(batch_size));
        std::vector<const Tensor*> views;
        std::vector<int> labels;
        for (std::size_t i = start; i < end; ++i) {
            views.push_back(&images[i].pixels);
            labels.push_back(images[i].label);
        }
        auto graph = forward_graph(net, assemble_batch(views));
        auto sce = softmax_cross_entropy(graph.logits, labels);
        const std::int64_t n = static_cast<std::int64_t>(labels.size());
        const std::int64_t classes = graph.logits->value.dim(1);
        loss_sum += static_cast<double>(sce.loss->value[0]) * static_cast<double>(n);
        for (std::int64_t r = 0; r < n; ++r)
            if (argmax_row(graph.logits->value.data() + r * classes, classes) ==
                labels[static_cast<std::size_t>(r)])
                ++correct;
    }
    EvalStats stats;
    stats.loss = loss_sum / static_cast<double>(images.size());
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(images.size());
    return stats;
}

TrainHistory train_feature_extraction(Network& net, const DatasetSplit& split,
                                      const OptimizerConfig& opt,
                                      const AugmentConfig& augment,
                                      const PlateauRule& stop, std::uint64_t seed) {
    opt.validate();
    stop.validate();
    check_split(net, split);

    freeze_all_but_head(net);
    const std::map<int, double> lrs = {{net.head().depth_index, opt.base_lr}};
    MomentumState state;
    PlateauDetector detector(stop.min_delta, stop.patience);
    BestTracker best;

    TrainHistory history;
    for (int epoch = 1; epoch <= stop.max_epochs; ++epoch) {
        const auto train_stats =
            train_one_epoch(net, split.train, opt, augment, lrs, state, seed, epoch);
        const auto val_stats = evaluate(net, split.validation, opt.batch_size);
        history.records.push_back(
            make_record(epoch, "pre-training", train_stats, val_stats, net, lrs));
        best.observe(net, val_stats.loss);
        if (detector.observe(val_stats.loss)) break;
    }
    best.restore(net);
    return history;
}

TrainHistory train_full_finetune(Network& net, const DatasetSplit& split,
                                 const OptimizerConfig& opt,
                                 const AugmentConfig& augment, std::uint64_t seed) {
    opt.validate();
    check_split(net, split);

    set_frozen(net, 0, net.max_depth(), false);
    std::map<int, double> lrs;
    for (const auto& g : net.groups) lrs[g.depth_index] = opt.base_lr;
    MomentumState state;
    BestTracker best;

    TrainHistory history;
    for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
        const auto train_stats =
            train_one_epoch(net, split.train, opt, augment, lrs, state, seed, epoch);
        const auto val_stats = evaluate(net, split.validation, opt.batch_size);
        history.records.push_back(
            make_record(epoch, "fine-tuning", train_stats, val_stats, net, lrs));
        best.observe(net, val_stats.loss);
    }
    best.restore(net);
    return history;
}

TrainHistory hybrid_tune(Network& net, const DatasetSplit& split,
                         const OptimizerConfig& opt, const HybridSchedule& schedule,
                         const AugmentConfig& augment, std::uint64_t seed) {
    opt.validate();
    schedule.validate();
    check_split(net, split);

    // Stage 1: the network is a fixed feature extractor; only the head learns.
    freeze_all_but_head(net);
    const int max_depth = net.max_depth();
    std::map<int, double> lrs =
        discriminative_lrs(schedule.head_lr, schedule.lr_decay_factor, unfrozen_depths(net),
                           max_depth);
    MomentumState state;
    PlateauDetector detector(schedule.stage1.min_delta, schedule.stage1.patience);
    BestTracker best;

    TrainHistory history;
    int epoch = 0;
    for (int e = 0; e < schedule.stage1.max_epochs; ++e) {
        ++epoch;
        const auto train_stats =
            train_one_epoch(net, split.train, opt, augment, lrs, state, seed, epoch);
        const auto val_stats = evaluate(net, split.validation, opt.batch_size);
        history.records.push_back(
            make_record(epoch, "pre-training", train_stats, val_stats, net, lrs));
        best.observe(net, val_stats.loss);
        if (detector.observe(val_stats.loss)) break;
    }

    // Stage 2: unfreeze one group at a time, head downward, retraining with
    // depth-discounted learning rates until the trigger fires per segment.
    for (int next = max_depth - 1; next >= 0; --next) {
        set_frozen(net, next, next, false);
        lrs = discriminative_lrs(schedule.head_lr, schedule.lr_decay_factor,
                                 unfrozen_depths(net), max_depth);
        detector.reset();
        for (int e = 0; e < opt.max_epochs; ++e) {
            ++epoch;
            const auto train_stats =
                train_one_epoch(net, split.train, opt, augment, lrs, state, seed, epoch);
            const auto val_stats = evaluate(net, split.validation, opt.batch_size);
            history.records.push_back(
                make_record(epoch, "fine-tuning", train_stats, val_stats, net, lrs));
            best.observe(net, val_stats.loss);
            const bool fired = schedule.unfreeze.trigger == UnfreezeTrigger::plateau
                                   ? detector.observe(val_stats.loss)
                                   : e + 1 >= schedule.unfreeze.epochs_per_stage;
            if (fired) break;
        }
    }
    best.restore(net);
    return history;
}

std::string TrainHistory::to_csv() const {
    std::ostringstream out;
    const std::size_t n_groups = records.empty() ? 0 : records.front().group_lrs.size();
    out << "epoch,stage,train_loss,train_accuracy,val_loss,val_accuracy,unfrozen_count,unfrozen_depths";
    for (std::size_t g = 0; g < n_groups; ++g) out << ",lr_g" << g;
    out << "\n";
    char buf[64];
    for (const auto& rec : records) {
        out << rec.epoch << "," << rec.stage;
        for (double v : {rec.train_loss, rec.train_accuracy, rec.val_loss, rec.val_accuracy}) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        out << "," << rec.unfrozen.size() << ",";
        for (std::size_t i = 0; i < rec.unfrozen.size(); ++i) {
            if (i) out << ";";
            out << rec.unfrozen[i];
        }
        for (double lr : rec.group_lrs) {
            std::snprintf(buf, sizeof buf, ",%.17g", lr);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

} // namespace binnet
