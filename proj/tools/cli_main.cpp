// Command-line front end: dataset synthesis, augmentation, ingestion,
// training, inference, evaluation and overlay rendering.  Every subcommand
// resolves its configuration as flags > config file > defaults, logs the
// resolved values, and derives all randomness from the single --seed.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "coco_ingest.hpp"
#include "dataset_io.hpp"
#include "overlay.hpp"
#include "parabox/datagen.hpp"
#include "parabox/heuristic.hpp"
#include "parabox/metrics.hpp"
#include "parabox/pipeline.hpp"
#include "parabox/training.hpp"
#include "run_config.hpp"

namespace {

using namespace parabox;
using nlohmann::json;

constexpr int kResultsVersion = 1;
constexpr int kReportVersion = 1;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n); ++t)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Binds one subcommand's options so that explicitly passed flags can be
// replayed over the config-file values.
struct ConfigBuilder {
  CLI::App* cmd;
  std::string config_path;
  json defaults = json::object();
  std::vector<std::function<void(json&)>> trackers;

  explicit ConfigBuilder(CLI::App* app) : cmd(app) {
    cmd->add_option("--config", config_path, "JSON config file");
  }

  template <typename T>
  void add(const std::string& name, T& var, const std::string& help) {
    defaults[name] = var;
    CLI::Option* opt = cmd->add_option("--" + name, var, help);
    trackers.push_back([name, opt, &var](json& flags) {
      if (opt->count() > 0) flags[name] = var;
    });
  }

  void add_flag(const std::string& name, bool& var, const std::string& help) {
    defaults[name] = var;
    CLI::Option* opt =
        cmd->add_flag("--" + name + ",!--no-" + name, var, help);
    trackers.push_back([name, opt, &var](json& flags) {
      if (opt->count() > 0) flags[name] = var;
    });
  }

  json resolve() const {
    json flags = json::object();
    for (const auto& t : trackers) t(flags);
    json resolved =
        resolve_config(defaults, load_config_file(config_path), flags);
    std::cout << "config " << resolved.dump() << "\n";
    return resolved;
  }
};

std::string require_path(const json& resolved, const std::string& key) {
  std::string value = resolved.at(key).get<std::string>();
  if (value.empty())
    throw std::runtime_error("missing required option --" + key);
  return value;
}

Pooling pooling_from(const std::string& name) {
  if (name == "attention") return Pooling::attention;
  if (name == "average") return Pooling::average;
  throw std::runtime_error("pooling must be attention or average");
}

// deterministic 1-in-k holdout split over the labeled pages
bool is_holdout(size_t index, double fraction) {
  if (fraction <= 0.0) return false;
  size_t k = (size_t)std::llround(1.0 / fraction);
  if (k < 2) k = 2;
  return index % k == k - 1;
}

struct PredictedPage {
  std::vector<Line> lines;
  std::vector<Paragraph> paragraphs;
};

void write_results(const std::string& path, const json& generator,
                   const std::vector<PredictedPage>& pages) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw std::runtime_error("cannot write " + path);
  json header = {{"format", "parabox-results"},
                 {"version", kResultsVersion},
                 {"generator", generator},
                 {"pages", pages.size()}};
  out << header.dump() << "\n";
  for (size_t i = 0; i < pages.size(); ++i) {
    json lines = json::array();
    for (const Line& l : pages[i].lines) lines.push_back(l.words);
    json paragraphs = json::array();
    for (const Paragraph& p : pages[i].paragraphs) {
      json region = json::array();
      for (const Point& pt : p.region) {
        region.push_back(pt.x);
        region.push_back(pt.y);
      }
      paragraphs.push_back({{"lines", p.lines}, {"region", region}});
    }
    out << json{{"page", i}, {"lines", lines}, {"paragraphs", paragraphs}}.dump()
        << "\n";
  }
}

std::vector<PredictedPage> read_results(const std::string& path,
                                        size_t expected_pages) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("cannot read " + path);
  std::string text;
  if (!std::getline(in, text))
    throw std::runtime_error(path + ": empty results file");
  json header = json::parse(text, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "parabox-results")
    throw std::runtime_error(path + ": not a results file");
  if (header.value("version", -1) != kResultsVersion)
    throw std::runtime_error(path + ": unsupported results version");

  std::vector<PredictedPage> out;
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() ||
        j.value("page", -1) != (int)out.size())
      throw std::runtime_error(path + ": bad record after page " +
                               std::to_string(out.size()));
    PredictedPage page;
    for (const auto& l : j.value("lines", json::array())) {
      Line line;
      for (const auto& w : l) line.words.push_back(w.get<int>());
      page.lines.push_back(std::move(line));
    }
    for (const auto& p : j.value("paragraphs", json::array())) {
      Paragraph para;
      for (const auto& li : p.value("lines", json::array()))
        para.lines.push_back(li.get<int>());
      const json& region = p.at("region");
      if (!region.is_array() || region.size() < 6 || region.size() % 2 != 0)
        throw std::runtime_error(path + ": bad region on page " +
                                 std::to_string(out.size()));
      for (size_t k = 0; k + 1 < region.size(); k += 2)
        para.region.push_back(
            {region[k].get<double>(), region[k + 1].get<double>()});
      page.paragraphs.push_back(std::move(para));
    }
    out.push_back(std::move(page));
  }
  if (out.size() != expected_pages)
    throw std::runtime_error(path + ": results cover " +
                             std::to_string(out.size()) + " pages, dataset has " +
                             std::to_string(expected_pages));
  return out;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------
void setup_gen(CLI::App& app) {
  auto* cmd = app.add_subcommand("gen", "synthesize a labeled dataset");
  auto cfg = std::make_shared<ConfigBuilder>(cmd);
  struct Opts {
    int pages = 200;
    uint64_t seed = 0;
    std::string out;
    int threads = 1;
    double rotation = 0.0;
    double perspective = 0.0;
    double p_merge = 0.5;
    double p_break = 0.08;
    double jitter = 0.04;
    bool ocr = true;
  };
  auto o = std::make_shared<Opts>();
  cfg->add("pages", o->pages, "number of pages");
  cfg->add("seed", o->seed, "master seed");
  cfg->add("out", o->out, "output dataset path");
  cfg->add("threads", o->threads, "worker threads");
  cfg->add("rotation", o->rotation, "augmentation rotation range, radians");
  cfg->add("perspective", o->perspective, "augmentation perspective range");
  cfg->add("p_merge", o->p_merge, "OCR same-row merge probability");
  cfg->add("p_break", o->p_break, "OCR line break probability");
  cfg->add("jitter", o->jitter, "OCR corner jitter fraction");
  cfg->add_flag("ocr", o->ocr, "apply OCR simulation");

  cmd->callback([cfg, o] {
    json resolved = cfg->resolve();
    Opts opt = *o;
    opt.pages = resolved.at("pages").get<int>();
    opt.seed = resolved.at("seed").get<uint64_t>();
    opt.out = require_path(resolved, "out");
    opt.threads = resolved.at("threads").get<int>();
    opt.rotation = resolved.at("rotation").get<double>();
    opt.perspective = resolved.at("perspective").get<double>();
    opt.p_merge = resolved.at("p_merge").get<double>();
    opt.p_break = resolved.at("p_break").get<double>();
    opt.jitter = resolved.at("jitter").get<double>();
    opt.ocr = resolved.at("ocr").get<bool>();
    if (opt.pages <= 0) throw std::runtime_error("pages must be positive");

    std::vector<Page> pages(opt.pages);
    parallel_for(opt.pages, opt.threads, [&](int i) {
      StyleSpec style = sample_style(derive_seed(opt.seed, 1, i));
      Page page = generate_page(style, derive_seed(opt.seed, 2, i));
      if (opt.rotation > 0.0 || opt.perspective > 0.0)
        page = augment_page(page, {opt.rotation, opt.perspective,
                                   derive_seed(opt.seed, 3, i)});
      if (opt.ocr)
        page = simulate_ocr(page, derive_seed(opt.seed, 4, i),
                            {opt.p_merge, opt.p_break, opt.jitter});
      pages[i] = std::move(page);
    });

    DatasetHeader header;
    header.seed = opt.seed;
    header.generator = resolved;
    header.generator["command"] = "gen";
    write_dataset(opt.out, header, pages);
    std::cout << "wrote " << pages.size() << " pages to " << opt.out << "\n";
  });
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------
void setup_augment(CLI::App& app) {
  auto* cmd = app.add_subcommand("augment", "geometric page augmentation");
  auto cfg = std::make_shared<ConfigBuilder>(cmd);
  struct Opts {
    std::string in, out;
    uint64_t seed = 0;
    int threads = 1;
    double rotation = 0.035;
    double perspective = 0.06;
  };
  auto o = std::make_shared<Opts>();
  cfg->add("in", o->in, "input dataset");
  cfg->add("out", o->out, "output dataset path");
  cfg->add("seed", o->seed, "master seed");
  cfg->add("threads", o->threads, "worker threads");
  cfg->add("rotation", o->rotation, "rotation range, radians");
  cfg->add("perspective", o->perspective, "perspective range");

  cmd->callback([cfg, o] {
    json resolved = cfg->resolve();
    Opts opt = *o;
    opt.in = require_path(resolved, "in");
    opt.out = require_path(resolved, "out");
    opt.seed = resolved.at("seed").get<uint64_t>();
    opt.threads = resolved.at("threads").get<int>();
    opt.rotation = resolved.at("rotation").get<double>();
    opt.perspective = resolved.at("perspective").get<double>();

    Dataset ds = read_dataset(opt.in);
    parallel_for((int)ds.pages.size(), opt.threads, [&](int i) {
      ds.pages[i] = augment_page(ds.pages[i], {opt.rotation, opt.perspective,
                                               derive_seed(opt.seed, 3, i)});
    });
    DatasetHeader header;
    header.seed = opt.seed;
    header.generator = resolved;
    header.generator["command"] = "augment";
    header.generator["source_generator"] = ds.header.generator;
    write_dataset(opt.out, header, ds.pages);
    std::cout << "augmented " << ds.pages.size() << " pages into " << opt.out
              << "\n";
  });
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------
void setup_ingest(CLI::App& app) {
  auto* cmd = app.add_subcommand("ingest", "convert COCO-style layout GT");
  auto cfg = std::make_shared<ConfigBuilder>(cmd);
  struct Opts {
    std::string coco, out, map;
  };
  auto o = std::make_shared<Opts>();
  cfg->add("coco", o->coco, "COCO annotation file");
  cfg->add("out", o->out, "output dataset path");
  cfg->add("map", o->map,
           "category mapping, e.g. 1=paragraph,2=paragraph,4=dont_care");

  cmd->callback([cfg, o] {
    json resolved = cfg->resolve();
    Opts opt = *o;
    opt.coco = require_path(resolved, "coco");
    opt.out = require_path(resolved, "out");
    opt.map = require_path(resolved, "map");

    CategoryMapping mapping;
    std::stringstream ss(opt.map);
    std::string entry;
    while (std::getline(ss, entry, ',')) {
      size_t eq = entry.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("bad mapping entry: " + entry);
      int id = std::stoi(entry.substr(0, eq));
      std::string role = entry.substr(eq + 1);
      if (role == "paragraph")
        mapping.roles[id] = CategoryRole::paragraph;
      else if (role == "dont_care")
        mapping.roles[id] = CategoryRole::dont_care;
      else
        throw std::runtime_error("role must be paragraph or dont_care: " + role);
    }

    IngestStats stats;
    Dataset ds = ingest_coco_layout(opt.coco, mapping, &stats);
    ds.header.generator = resolved;
    ds.header.generator["command"] = "ingest";
    write_dataset(opt.out, ds.header, ds.pages);
    std::cout << "pages in " << stats.pages_in << ", pages out "
              << stats.pages_out << ", malformed records "
              << stats.malformed_records << ", skipped polygons "
              << stats.skipped_polygons << "\n";
  });
}

// ---------------------------------------------------------------------------
// train-split / train-cluster
// ---------------------------------------------------------------------------
void setup_train(CLI::App& app, bool split_task) {
  auto* cmd = app.add_subcommand(
      split_task ? "train-split" : "train-cluster",
      split_task ? "train the line-splitting node model"
                 : "train the line-clustering edge model");
  auto cfg = std::make_shared<ConfigBuilder>(cmd);
  struct Opts {
    std::string data, out;
    uint64_t seed = 0;
    double holdout_fraction = 0.2;
    int epochs = 40;
    int batch_size = 8;
    double learning_rate = 1e-3;
    int patience = 5;
    int steps = 8;
    int hidden = 32;
    int heads = 4;
    std::string pooling = "attention";
  };
  auto o = std::make_shared<Opts>();
  cfg->add("data", o->data, "training dataset");
  cfg->add("out", o->out, "output model path");
  cfg->add("seed", o->seed, "training seed");
  cfg->add("holdout_fraction", o->holdout_fraction, "held-out page fraction");
  cfg->add("epochs", o->epochs, "max epochs");
  cfg->add("batch_size", o->batch_size, "pages per update");
  cfg->add("learning_rate", o->learning_rate, "step size");
  cfg->add("patience", o->patience, "early-stop patience, 0 disables");
  cfg->add("steps", o->steps, "message passing rounds");
  cfg->add("hidden", o->hidden, "hidden width");
  cfg->add("heads", o->heads, "attention heads");
  cfg->add("pooling", o->pooling, "attention or average");

  cmd->callback([cfg, o, split_task] {
    json resolved = cfg->resolve();
    Opts opt = *o;
    opt.data = require_path(resolved, "data");
    opt.out = require_path(resolved, "out");
    opt.seed = resolved.at("seed").get<uint64_t>();
    opt.holdout_fraction = resolved.at("holdout_fraction").get<double>();
    opt.epochs = resolved.at("epochs").get<int>();
    opt.batch_size = resolved.at("batch_size").get<int>();
    opt.learning_rate = resolved.at("learning_rate").get<double>();
    opt.patience = resolved.at("patience").get<int>();
    opt.steps = resolved.at("steps").get<int>();
    opt.hidden = resolved.at("hidden").get<int>();
    opt.heads = resolved.at("heads").get<int>();
    opt.pooling = resolved.at("pooling").get<std::string>();
    if (opt.holdout_fraction < 0.0 || opt.holdout_fraction > 0.5)
      throw std::runtime_error("holdout_fraction must be in [0, 0.5]");

    Dataset ds = read_dataset(opt.data);
    std::vector<LabeledPage> train, holdout;
    int skipped = 0;
    size_t labeled = 0;
    for (const Page& page : ds.pages) {
      if (page.ocr_words.empty()) continue;
      std::optional<LabeledPage> lp;
      if (split_task) {
        lp = split_training_page(page);
      } else {
        lp = cluster_training_page(page);
        if (!lp) {
          ++skipped;
          continue;
        }
      }
      (is_holdout(labeled, opt.holdout_fraction) ? holdout : train)
          .push_back(std::move(*lp));
      ++labeled;
    }
    if (!split_task && skipped > 0)
      std::cout << "skipped " << skipped << " under-split pages\n";
    std::cout << "train pages " << train.size() << ", holdout pages "
              << holdout.size() << "\n";

    GcnConfig arch;
    arch.steps = opt.steps;
    arch.hidden_width = opt.hidden;
    arch.heads = opt.heads;
    arch.pooling = pooling_from(opt.pooling);
    arch.head_type =
        split_task ? HeadType::node_binary_pair : HeadType::edge_binary;
    arch.input_width = split_task ? 29 : 30;

    TrainConfig tc;
    tc.learning_rate = opt.learning_rate;
    tc.batch_size = opt.batch_size;
    tc.epochs = opt.epochs;
    tc.seed = opt.seed;
    tc.weight_positive = balanced_positive_weight(train);
    std::cout << "positive weight " << tc.weight_positive << "\n";

    FitResult fit = fit_model(arch, tc, train, holdout, opt.patience,
                              &std::cout);
    save_model(fit.model, opt.out);
    std::cout << "best epoch " << fit.best_epoch << ", final train loss "
              << fit.train_loss.back() << ", saved " << opt.out << "\n";
  });
}

// ---------------------------------------------------------------------------
// prediction sources shared by infer / eval / overlay
// ---------------------------------------------------------------------------
std::vector<PredictedPage> run_models(const Dataset& ds,
                                      const std::string& split_path,
                                      const std::string& cluster_path,
                                      int threads) {
  GcnModel split_model = load_model(split_path, HeadType::node_binary_pair);
  GcnModel cluster_model = load_model(cluster_path, HeadType::edge_binary);
  std::vector<PredictedPage> out(ds.pages.size());
  parallel_for((int)ds.pages.size(), threads, [&](int i) {
    const Page& page = ds.pages[i];
    if (page.ocr_words.empty()) return;
    PipelineDetails details =
        extract_paragraphs_with_details(page, split_model, cluster_model);
    out[i].lines = std::move(details.split.lines);
    out[i].paragraphs = std::move(details.cluster.paragraphs);
  });
  return out;
}

std::vector<PredictedPage> run_heuristic(const Dataset& ds, int threads) {
  std::vector<PredictedPage> out(ds.pages.size());
  parallel_for((int)ds.pages.size(), threads, [&](int i) {
    const Page& page = ds.pages[i];
    HeuristicDetails details =
        heuristic_paragraphs_with_details(page.ocr_words, page.ocr_raw_lines);
    out[i].lines = std::move(details.merged_lines);
    out[i].paragraphs = std::move(details.paragraphs);
  });
  return out;
}

// ---------------------------------------------------------------------------
// infer
// ---------------------------------------------------------------------------
void setup_infer(CLI::App& app) {
  auto* cmd = app.add_subcommand("infer", "run the two-stage extractor");
  auto cfg = std::make_shared<ConfigBuilder>(cmd);
  struct Opts {
    std::string data, split_model, cluster_model, out;
    int threads = 1;
  };
  auto o = std::make_shared<Opts>();
  cfg->add("data", o->data, "input dataset");
  cfg->add("split_model", o->split_model, "node model file");
  cfg->add("cluster_model", o->cluster_model, "edge model file");
  cfg->add("out", o->out, "output results path");
  cfg->add("threads", o->threads, "worker threads");

  cmd->callback([cfg, o] {
    json resolved = cfg->resolve();
    Opts opt = *o;
    opt.data = require_path(resolved, "data");
    opt.split_model = require_path(resolved, "split_model");
    opt.cluster_model = require_path(resolved, "cluster_model");
    opt.out = require_path(resolved, "out");
    opt.threads = resolved.at("threads").get<int>();

    Dataset ds = read_dataset(opt.data);
    std::vector<PredictedPage> results =
        run_models(ds, opt.split_model, opt.cluster_model, opt.threads);
    json generator = resolved;
    generator["command"] = "infer";
    write_results(opt.out, generator, results);
    std::cout << "wrote results for " << results.size() << " pages to "
              << opt.out << "\n";
  });
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------
void setup_eval(CLI::App& app) {
  auto* cmd = app.add_subcommand("eval", "score predictions against GT");
  auto cfg = std::make_shared<ConfigBuilder>(cmd);
  struct Opts {
    std::string data, pred, split_model, cluster_model, out;
    bool heuristic = false;
    int threads = 1;
  };
  auto o = std::make_shared<Opts>();
  cfg->add("data", o->data, "ground-truth dataset");
  cfg->add("pred", o->pred, "results file from infer");
  cfg->add("split_model", o->split_model, "node model file");
  cfg->add("cluster_model", o->cluster_model, "edge model file");
  cfg->add_flag("heuristic", o->heuristic, "score the rule-based baseline");
  cfg->add("out", o->out, "output report path");
  cfg->add("threads", o->threads, "worker threads");

  cmd->callback([cfg, o] {
    json resolved = cfg->resolve();
    Opts opt = *o;
    opt.data = require_path(resolved, "data");
    opt.pred = resolved.at("pred").get<std::string>();
    opt.split_model = resolved.at("split_model").get<std::string>();
    opt.cluster_model = resolved.at("cluster_model").get<std::string>();
    opt.heuristic = resolved.at("heuristic").get<bool>();
    opt.out = require_path(resolved, "out");
    opt.threads = resolved.at("threads").get<int>();

    int sources = (!opt.pred.empty() ? 1 : 0) + (opt.heuristic ? 1 : 0) +
                  (!opt.split_model.empty() ? 1 : 0);
    if (sources != 1)
      throw std::runtime_error(
          "give exactly one prediction source: --pred, --heuristic, or "
          "--split_model with --cluster_model");

    Dataset ds = read_dataset(opt.data);
    std::vector<PredictedPage> preds;
    if (!opt.pred.empty())
      preds = read_results(opt.pred, ds.pages.size());
    else if (opt.heuristic)
      preds = run_heuristic(ds, opt.threads);
    else
      preds = run_models(ds, opt.split_model, opt.cluster_model, opt.threads);

    std::vector<EvalReport> reports(ds.pages.size());
    parallel_for((int)ds.pages.size(), opt.threads, [&](int i) {
      std::vector<std::vector<Point>> regions;
      for (const Paragraph& p : preds[i].paragraphs)
        regions.push_back(p.region);
      std::vector<std::vector<Point>> dc;
      for (const Quad& q : ds.pages[i].dont_care)
        dc.push_back(quad_polygon(q));
      reports[i] = evaluate_page(regions, gt_paragraphs_of(ds.pages[i]), dc);
    });

    std::ofstream out(opt.out, std::ios::binary);
    if (!out.good()) throw std::runtime_error("cannot write " + opt.out);
    json generator = resolved;
    generator["command"] = "eval";
    out << json{{"format", "parabox-report"},
                {"version", kReportVersion},
                {"generator", generator},
                {"pages", ds.pages.size()}}
               .dump()
        << "\n";
    double sp = 0, sr = 0, sf = 0, sfh = 0, sm = 0;
    for (size_t i = 0; i < reports.size(); ++i) {
      const EvalReport& r = reports[i];
      out << json{{"page", i},
                  {"precision", r.variable.precision},
                  {"recall", r.variable.recall},
                  {"f1_var", r.f1_var},
                  {"f1_fixed_050", r.f1_at_half},
                  {"map", r.map},
                  {"preds", r.variable.considered_preds},
                  {"gts", r.variable.n_gts}}
                 .dump()
          << "\n";
      sp += r.variable.precision;
      sr += r.variable.recall;
      sf += r.f1_var;
      sfh += r.f1_at_half;
      sm += r.map;
    }
    size_t n = std::max<size_t>(1, reports.size());
    json aggregate = {{"pages", reports.size()},
                      {"precision", sp / n},
                      {"recall", sr / n},
                      {"f1_var", sf / n},
                      {"f1_fixed_050", sfh / n},
                      {"map", sm / n}};
    out << json{{"aggregate", aggregate}}.dump() << "\n";
    std::cout << "aggregate " << aggregate.dump() << "\n";
  });
}

// ---------------------------------------------------------------------------
// overlay
// ---------------------------------------------------------------------------
void setup_overlay(CLI::App& app) {
  auto* cmd = app.add_subcommand("overlay", "render per-page box overlays");
  auto cfg = std::make_shared<ConfigBuilder>(cmd);
  struct Opts {
    std::string data, pred, split_model, cluster_model, outdir;
    int limit = 0;
    int threads = 1;
  };
  auto o = std::make_shared<Opts>();
  cfg->add("data", o->data, "input dataset");
  cfg->add("pred", o->pred, "results file; GT paragraphs when absent");
  cfg->add("split_model", o->split_model, "node model file");
  cfg->add("cluster_model", o->cluster_model, "edge model file");
  cfg->add("outdir", o->outdir, "output image directory");
  cfg->add("limit", o->limit, "render only the first N pages, 0 = all");
  cfg->add("threads", o->threads, "worker threads");

  cmd->callback([cfg, o] {
    json resolved = cfg->resolve();
    Opts opt = *o;
    opt.data = require_path(resolved, "data");
    opt.pred = resolved.at("pred").get<std::string>();
    opt.split_model = resolved.at("split_model").get<std::string>();
    opt.cluster_model = resolved.at("cluster_model").get<std::string>();
    opt.outdir = require_path(resolved, "outdir");
    opt.limit = resolved.at("limit").get<int>();
    opt.threads = resolved.at("threads").get<int>();

    Dataset ds = read_dataset(opt.data);
    std::vector<PredictedPage> preds;
    if (!opt.pred.empty()) {
      preds = read_results(opt.pred, ds.pages.size());
    } else if (!opt.split_model.empty()) {
      preds = run_models(ds, opt.split_model, opt.cluster_model, opt.threads);
    } else {
      preds.resize(ds.pages.size());
      for (size_t i = 0; i < ds.pages.size(); ++i)
        for (const GtParagraph& g : gt_paragraphs_of(ds.pages[i]))
          preds[i].paragraphs.push_back({{}, g.region});
    }

    std::filesystem::create_directories(opt.outdir);
    int count = (int)ds.pages.size();
    if (opt.limit > 0) count = std::min(count, opt.limit);
    std::vector<std::vector<unsigned char>> images(count);
    parallel_for(count, opt.threads, [&](int i) {
      images[i] = render_overlay_png(ds.pages[i], preds[i].paragraphs);
    });
    for (int i = 0; i < count; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "page_%05d.png", i);
      std::ofstream img(std::filesystem::path(opt.outdir) / name,
                        std::ios::binary);
      img.write((const char*)images[i].data(), (std::streamsize)images[i].size());
      if (!img.good()) throw std::runtime_error("cannot write overlay " +
                                                std::string(name));
    }
    std::cout << "rendered " << count << " overlays into " << opt.outdir
              << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paragraph identification from OCR boxes"};
  app.require_subcommand(1);
  setup_gen(app);
  setup_augment(app);
  setup_ingest(app);
  setup_train(app, true);
  setup_train(app, false);
  setup_infer(app);
  setup_eval(app);
  setup_overlay(app);
  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
