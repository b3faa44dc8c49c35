#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "binnet/augment.hpp"
#include "binnet/dataset.hpp"
#include "binnet/nn.hpp"

namespace binnet {

struct OptimizerConfig {
    double base_lr = 0.01;
    double momentum = 0.9;
    int batch_size = 32;
    int max_epochs = 40; // cap per training stage

    void validate() const;
};

struct PlateauRule {
    double min_delta = 1e-3;
    int patience = 5;
    int max_epochs = 100;

    void validate() const;
};

enum class UnfreezeTrigger { plateau, fixed_epochs };

struct UnfreezePolicy {
    UnfreezeTrigger trigger = UnfreezeTrigger::plateau;
    int epochs_per_stage = 8; // only used by fixed_epochs
};

struct HybridSchedule {
    PlateauRule stage1;
    UnfreezePolicy unfreeze;
    double lr_decay_factor = 2.0; // per depth step toward the input
    double head_lr = 0.01;

    void validate() const;
};

struct EpochRecord {
    int epoch = 0;              // 1-based, strictly increasing across stages
    std::string stage;          // "pre-training" or "fine-tuning"
    double train_loss = 0;
    double train_accuracy = 0;
    double val_loss = 0;
    double val_accuracy = 0;
    std::vector<int> unfrozen;      // sorted depth indices
    std::vector<double> group_lrs;  // one entry per group, 0 when frozen
};

struct TrainHistory {
    std::vector<EpochRecord> records;

    std::string to_csv() const;
    bool empty() const { return records.empty(); }
    const EpochRecord& back() const { return records.back(); }
};

// lr(d) = head_lr / decay^(max_depth - d) for each unfrozen depth d; the
// head trains fastest, layers closer to the input progressively slower.
std::map<int, double> discriminative_lrs(double head_lr, double decay,
                                         const std::vector<int>& unfrozen_depths,
                                         int max_depth);

// Streaming form of the plateau rule: best-so-far improves only on gains of
// at least min_delta; the plateau fires once `patience` consecutive epochs
// fail to improve it.
class PlateauDetector {
public:
    PlateauDetector(double min_delta, int patience)
        : min_delta_(min_delta), patience_(patience) {}

    bool observe(double loss);
    void reset();

private:
    double min_delta_;
    int patience_;
    bool has_best_ = false;
    double best_ = 0;
    int streak_ = 0;
};

// Whole-sequence evaluation of the same rule.
bool plateau_detect(const std::vector<double>& losses, double min_delta, int patience);

// Per-group velocity buffers, keyed by depth index.
struct MomentumState {
    std::map<int, std::vector<Tensor>> velocity;
};

// v <- momentum*v - lr_g*grad; param <- param + v, per unfrozen group.
// Frozen groups are untouched; gradients[g] must be empty for them.
void sgd_step(Network& net, const std::vector<std::vector<Tensor>>& gradients,
              const std::map<int, double>& per_group_lrs, double momentum,
              MomentumState& state);

// Mean cross-entropy loss and accuracy over a list of images (no
// augmentation).
struct EvalStats {
    double loss = 0;
    double accuracy = 0;
};
EvalStats evaluate(const Network& net, const std::vector<LabeledImage>& images,
                   int batch_size);

// Stage 1 of the hybrid procedure, also usable standalone: freezes every
// group but the head and trains the head at opt.base_lr until the stop rule
// plateaus or its epoch cap is hit. Like every strategy here, the network is
// left holding the weights of its best validation-loss epoch.
TrainHistory train_feature_extraction(Network& net, const DatasetSplit& split,
                                      const OptimizerConfig& opt,
                                      const AugmentConfig& augment,
                                      const PlateauRule& stop, std::uint64_t seed);

// Baseline: every group unfrozen from epoch 0 at a single learning rate for
// opt.max_epochs.
TrainHistory train_full_finetune(Network& net, const DatasetSplit& split,
                                 const OptimizerConfig& opt,
                                 const AugmentConfig& augment, std::uint64_t seed);

// The two-stage procedure: head-only pre-training until the stage-1 rule
// fires, then groups are unfrozen one at a time from the head downward, with
// per-group learning rates recomputed from the schedule after each unfreeze.
TrainHistory hybrid_tune(Network& net, const DatasetSplit& split,
                         const OptimizerConfig& opt, const HybridSchedule& schedule,
                         const AugmentConfig& augment, std::uint64_t seed);

std::vector<int> unfrozen_depths(const Network& net);

} // namespace binnet
