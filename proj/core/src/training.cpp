#include "parabox/training.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "parabox/rng.hpp"

namespace parabox {

double balanced_positive_weight(const std::vector<LabeledPage>& pages,
                                double cap) {
  int64_t pos = 0, neg = 0;
  for (const auto& page : pages)
    for (signed char l : page.labels) {
      if (l == 1) ++pos;
      if (l == 0) ++neg;
    }
  if (pos == 0 || neg == 0) return 1.0;
  return std::min((double)neg / (double)pos, cap);
}

FitResult fit_model(const GcnConfig& arch, const TrainConfig& optimizer,
                    const std::vector<LabeledPage>& train,
                    const std::vector<LabeledPage>& holdout, int patience,
                    std::ostream* log) {
  if (train.empty()) throw std::invalid_argument("fit_model: empty train set");
  if (optimizer.epochs <= 0)
    throw std::invalid_argument("fit_model: epochs must be positive");
  if (optimizer.batch_size <= 0)
    throw std::invalid_argument("fit_model: batch_size must be positive");

  FitResult out;
  out.model = init_model(arch, optimizer.seed);
  AdamState adam = init_adam(out.model);

  GcnModel best = out.model;
  double best_loss = std::numeric_limits<double>::max();
  int stall = 0;

  Rng base(optimizer.seed);
  int n = (int)train.size();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < optimizer.epochs; ++epoch) {
    Rng shuffle = base.split(epoch);
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[shuffle.uniform_int(0, i)]);

    double epoch_loss = 0.0;
    int batches = 0;
    for (int at = 0; at < n; at += optimizer.batch_size) {
      int stop = std::min(n, at + optimizer.batch_size);
      std::vector<LabeledPage> batch;
      batch.reserve(stop - at);
      for (int k = at; k < stop; ++k) batch.push_back(train[order[k]]);
      auto [loss, grads] = loss_and_gradients(out.model, batch, optimizer);
      std::string diagnostic;
      apply_update(out.model, grads, adam, optimizer, &diagnostic);
      if (log && !diagnostic.empty())
        *log << "epoch " << epoch << ": " << diagnostic << "\n";
      epoch_loss += loss;
      ++batches;
    }
    out.train_loss.push_back(epoch_loss / batches);

    if (holdout.empty()) {
      out.best_epoch = epoch;
      if (log)
        *log << "epoch " << epoch << " train " << out.train_loss.back()
             << std::endl;
      continue;
    }
    double hl = batch_loss(out.model, holdout, optimizer);
    out.holdout_loss.push_back(hl);
    if (log)
      *log << "epoch " << epoch << " train " << out.train_loss.back()
           << " holdout " << hl << std::endl;
    if (hl < best_loss) {
      best_loss = hl;
      best = out.model;
      out.best_epoch = epoch;
      stall = 0;
    } else if (++stall >= patience && patience > 0) {
      break;
    }
  }
  if (!holdout.empty()) out.model = best;
  return out;
}

}  // namespace parabox
