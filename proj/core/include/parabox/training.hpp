#pragma once

// Deterministic training loop over labeled pages: per-epoch shuffle, batched
// adaptive-moment updates, optional early stopping on a held-out split.

#include <iosfwd>
#include <vector>

#include "parabox/graphnet.hpp"

namespace parabox {

struct FitResult {
  GcnModel model;  // best holdout snapshot, or the final weights without one
  std::vector<double> train_loss;    // mean batch loss per epoch
  std::vector<double> holdout_loss;  // empty when no holdout was given
  int best_epoch = -1;               // epoch the returned weights come from
};

// Ratio of negative to positive labels across the pages (don't-care items
// ignored), capped; 1.0 when either class is absent.  Feed the result into
// TrainConfig::weight_positive to balance sparse positives.
double balanced_positive_weight(const std::vector<LabeledPage>& pages,
                                double cap = 10.0);

// Trains a fresh model (weights seeded from optimizer.seed) for
// optimizer.epochs epochs.  With a holdout, the best-loss epoch is tracked
// and returned; patience > 0 additionally stops after that many epochs
// without improvement.  Same inputs give bit-identical results.  `log`, when
// given, receives one line per epoch.
FitResult fit_model(const GcnConfig& arch, const TrainConfig& optimizer,
                    const std::vector<LabeledPage>& train,
                    const std::vector<LabeledPage>& holdout, int patience = 5,
                    std::ostream* log = nullptr);

}  // namespace parabox
