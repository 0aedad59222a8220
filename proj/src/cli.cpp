// Copyright 2026 The OVC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ovc/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "ovc/aggregator.hpp"
#include "ovc/average_precision.hpp"
#include "ovc/benchmark.hpp"
#include "ovc/binary_io.hpp"
#include "ovc/embedding_bank.hpp"
#include "ovc/error.hpp"
#include "ovc/exemplar_resolver.hpp"
#include "ovc/fusion.hpp"
#include "ovc/scoring.hpp"
#include "ovc/synthetic.hpp"
#include "ovc/text_classifier.hpp"
#include "ovc/trainer.hpp"
#include "ovc/tta.hpp"
#include "ovc/vocabulary.hpp"

namespace ovc::cli {
namespace {

namespace fs = std::filesystem;

// Options shared by several subcommands. Unset optionals mean "not given".
struct Options {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string bank;
  std::string out;
  std::string recipe = "gentle";
  std::optional<std::size_t> k;
  std::string modality;

  std::string vocab;
  std::string pools;
  std::string descriptions;
  std::string prompt_template;
  std::string prompts_out;
  std::string model;
  std::string text;
  std::string visual;
  std::string catalog;
  std::optional<std::uint32_t> variants;
  std::string queries;
  std::string regions;
  std::string detections;
  std::string gt;
  std::string report;
  std::string report_csv;
  std::string checkpoint_dir;
  std::optional<std::uint32_t> epochs;
  std::optional<double> logit_scale;
  std::optional<double> bias;
  bool include_empty = false;
  std::string ks = "1,2,5,10";
  std::string preset = "default";
  std::string fixture_case = "all";
  std::string queries_out;
  std::string vocab_out;
  std::size_t classes = 50;
  std::size_t dim = 32;
  std::size_t per_class = 20;
  std::size_t queries_per_class = 10;
  double sigma = 0.05;
  std::optional<std::size_t> min_full;
  std::optional<std::size_t> min_reduced;
  std::optional<double> min_box_area;
};

void Require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required flag ") + flag);
}

void EchoSeed(std::ostream& out, std::uint64_t seed) { out << "seed: " << seed << "\n"; }

std::uint64_t SeedOr(const Options& o, std::uint64_t fallback) {
  return o.seed ? *o.seed : fallback;
}

std::vector<std::size_t> ParseKs(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(part, &used);
      if (used != part.size() || v == 0) throw std::invalid_argument(part);
      ks.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--ks: '" + part + "' is not a positive integer");
    }
  }
  if (ks.empty()) throw ConfigError("--ks: empty list");
  return ks;
}

ScoringHead HeadFrom(const Options& o) {
  ScoringHead head;
  if (o.logit_scale) head.logit_scale = *o.logit_scale;
  if (o.bias) head.bias = *o.bias;
  head.Validate();
  return head;
}

TrainConfig TrainConfigFrom(const Options& o, bool benchmark_defaults) {
  TrainConfig c;
  if (!o.config.empty()) {
    c = TrainConfigFromJson(ReadTextFile(o.config));
  } else if (benchmark_defaults) {
    c = DefaultRetrievalBenchmark(0).train;
  }
  if (o.seed) {
    c.seed = *o.seed;
    c.model.seed = *o.seed;
  }
  if (o.k) c.max_k = static_cast<std::uint32_t>(*o.k);
  if (o.epochs) c.epochs = *o.epochs;
  c.Validate();
  return c;
}

fs::path Sibling(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

// ---- subcommands -------------------------------------------------------

void ResolveCmd(const Options& o, std::ostream& out) {
  Require(o.vocab, "--vocab");
  Require(o.pools, "--pools");
  Require(o.out, "--out");
  const Vocabulary vocab = LoadVocabulary(o.vocab);
  ResolverInput input = ParseResolverInput(ReadTextFile(o.pools));
  if (o.min_full) input.config.min_full = *o.min_full;
  if (o.min_reduced) input.config.min_reduced = *o.min_reduced;
  if (o.min_box_area) input.config.min_box_area = *o.min_box_area;
  const ExemplarCatalog catalog = ResolveExemplars(vocab, input.pools, input.config);
  WriteFileAtomic(o.out, CatalogToJson(catalog));
  EchoSeed(out, SeedOr(o, 0));
  std::size_t full = 0, reduced = 0;
  for (const auto& [id, e] : catalog.classes) {
    full += e.tier == ExemplarTier::kFull;
    reduced += e.tier == ExemplarTier::kReduced;
  }
  out << "classes: " << catalog.classes.size() << " full: " << full << " reduced: " << reduced
      << " shortfall: " << catalog.shortfall.size() << "\n";
}

void BuildTextCmd(const Options& o, std::ostream& out) {
  Require(o.descriptions, "--descriptions");
  const std::string target = !o.bank.empty() ? o.bank : o.out;
  Require(target, "--bank");
  const auto sets = IngestDescriptions(o.descriptions);
  const ClassifierBank bank = BuildTextClassifierBank(sets);
  if (!o.vocab.empty()) {
    const Vocabulary vocab = LoadVocabulary(o.vocab);
    for (const auto& id : bank.ClassIds()) {
      if (!vocab.Contains(id)) throw ValidationError("build-text: class '" + id + "' not in vocabulary");
    }
    if (!o.prompts_out.empty()) {
      const PromptTemplate tmpl = o.prompt_template.empty() ? PromptTemplate()
                                                            : PromptTemplate(o.prompt_template);
      std::string lines;
      for (const ClassEntry& e : vocab.entries()) {
        lines += nlohmann::json{{"class", e.id}, {"prompt", tmpl.Render(e.name)}}.dump() + "\n";
      }
      WriteFileAtomic(o.prompts_out, lines);
    }
  } else if (!o.prompts_out.empty()) {
    throw ConfigError("--prompts-out needs --vocab");
  }
  SaveClassifierBank(bank, target);
  EchoSeed(out, SeedOr(o, 0));
  out << "classes: " << bank.size() << " dim: " << bank.dimension() << "\n";
}

void TrainCmd(const Options& o, std::ostream& out) {
  Require(o.bank, "--bank");
  Require(o.out, "--out");
  const TrainConfig config = TrainConfigFrom(o, false);
  const EmbeddingBank bank = LoadBank(o.bank);
  std::optional<Vocabulary> vocab;
  if (!o.vocab.empty()) vocab = LoadVocabulary(o.vocab);
  const fs::path out_path = o.out;
  const fs::path report_json = o.report.empty() ? Sibling(out_path, ".report.json") : fs::path(o.report);
  const fs::path report_csv = o.report_csv.empty() ? Sibling(out_path, ".loss.csv") : fs::path(o.report_csv);
  if (!o.checkpoint_dir.empty()) fs::create_directories(o.checkpoint_dir);
  TrainResult result = Train(
      config, bank, vocab ? &*vocab : nullptr,
      [&](std::uint32_t epoch, const AggregatorModel& model, const TrainReport& report) {
        SaveModel(model, out_path);
        if (!o.checkpoint_dir.empty()) {
          char name[32];
          std::snprintf(name, sizeof(name), "epoch%03u.ovag", epoch);
          SaveModel(model, fs::path(o.checkpoint_dir) / name);
        }
        out << "epoch " << epoch << " loss " << report.epoch_losses.back() << "\n";
      });
  SaveModel(result.model, out_path);
  WriteFileAtomic(report_json, TrainReportToJson(result.report));
  WriteFileAtomic(report_csv, TrainReportToCsv(result.report));
  EchoSeed(out, config.seed);
  out << "steps: " << result.report.steps << " final loss: " << result.report.final_loss << "\n";
}

void BuildVisualCmd(const Options& o, std::ostream& out) {
  Require(o.bank, "--bank");
  Require(o.out, "--out");
  const Modality modality = ParseModality(o.modality.empty() ? "vision-agg" : o.modality);
  const EmbeddingBank bank = LoadBank(o.bank);
  std::optional<AggregatorModel> model;
  if (modality == Modality::kVisionAgg) {
    Require(o.model, "--model");
    model = LoadModel(o.model);
  }
  const ClassifierBank out_bank =
      BuildVisualClassifiers(bank, modality, o.k.value_or(0), model ? &*model : nullptr);
  SaveClassifierBank(out_bank, o.out);
  EchoSeed(out, SeedOr(o, 0));
  out << "classes: " << out_bank.size() << " modality: " << ModalityName(modality) << "\n";
}

void FuseCmd(const Options& o, std::ostream& out) {
  Require(o.text, "--text");
  Require(o.visual, "--visual");
  Require(o.out, "--out");
  const ClassifierBank fused =
      FuseClassifierBanks(LoadClassifierBank(o.text), LoadClassifierBank(o.visual));
  SaveClassifierBank(fused, o.out);
  EchoSeed(out, SeedOr(o, 0));
  out << "classes: " << fused.size() << "\n";
}

void PlanTtaCmd(const Options& o, std::ostream& out) {
  Require(o.catalog, "--catalog");
  Require(o.out, "--out");
  TtaRecipe recipe = TtaRecipe::Named(ParseTtaKind(o.recipe));
  if (o.variants) recipe.variants = *o.variants;
  const std::uint64_t seed = SeedOr(o, 0);
  const TtaPlan plan = PlanTta(CatalogFromJson(ReadTextFile(o.catalog)), recipe, seed);
  WriteFileAtomic(o.out, TtaJobsToJsonl(plan.jobs));
  EchoSeed(out, seed);
  out << "jobs: " << plan.jobs.size() << " skipped classes: " << plan.skipped.size() << "\n";
}

Vocabulary VocabFor(const Options& o, const std::vector<std::string>& class_ids) {
  if (!o.vocab.empty()) return LoadVocabulary(o.vocab);
  Vocabulary vocab;
  for (const std::string& id : class_ids) vocab.Add(ClassEntry{id, id, std::nullopt, FrequencyBucket::kFrequent, false});
  return vocab;
}

void EvalCmd(const Options& o, std::ostream& out) {
  Require(o.out, "--out");
  ApOptions ap_options;
  ap_options.include_classes_without_gt = o.include_empty;
  EvalResult result;
  if (!o.detections.empty()) {
    Require(o.gt, "--gt");
    const auto dets = ParseDetections(ReadTextFile(o.detections));
    const auto gt = ParseGroundTruth(ReadTextFile(o.gt));
    std::vector<std::string> ids;
    for (const auto& g : gt) ids.push_back(g.class_id);
    for (const auto& d : dets) ids.push_back(d.class_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    result = ComputeAp(dets, gt, VocabFor(o, ids), ap_options);
  } else {
    Require(o.bank, "--bank");
    Require(o.queries, "--queries");
    const ClassifierBank bank = LoadClassifierBank(o.bank);
    const EmbeddingBank queries = LoadBank(o.queries);
    const ScoringHead head = HeadFrom(o);
    std::optional<AggregatorModel> model;
    if (!o.model.empty()) model = LoadModel(o.model);
    const AggregatorModel* m = model ? &*model : nullptr;
    if (!o.gt.empty()) {
      Require(o.regions, "--regions");
      const auto regions = ParseRegions(ReadTextFile(o.regions));
      const auto gt = ParseGroundTruth(ReadTextFile(o.gt));
      EmbeddingBank features = queries;
      if (m != nullptr) {
        features = EmbeddingBank(queries.dimension());
        for (const auto& [id, records] : queries.classes()) {
          for (const auto& r : records) {
            const Embedding single[] = {r.values};
            features.Add(id, m->Aggregate(single), r.source, r.augmentation);
          }
        }
      }
      const auto dets = ScoreRegions(regions, features, bank, head);
      result = ComputeAp(dets, gt, VocabFor(o, bank.ClassIds()), ap_options);
    } else {
      const QuerySet qs = EmbedQueries(queries, m);
      const RetrievalResult r = EvaluateRetrieval(ScoreQueries(qs.features, bank, head), qs.labels);
      result.top1 = r.top1;
      result.top5 = r.top5;
    }
  }
  WriteFileAtomic(o.out, EvalResultToJson(result));
  EchoSeed(out, SeedOr(o, 0));
  out << EvalResultToTable(result);
}

void SweepCmd(const Options& o, std::ostream& out) {
  Require(o.bank, "--bank");
  Require(o.queries, "--queries");
  Require(o.out, "--out");
  const TrainConfig config = TrainConfigFrom(o, true);
  const std::vector<std::size_t> ks = ParseKs(o.ks);
  const auto rows =
      SweepK(LoadBank(o.bank), LoadBank(o.queries), config, ks, HeadFrom(o));
  const std::string csv = SweepToCsv(rows);
  WriteFileAtomic(o.out, csv);
  EchoSeed(out, config.seed);
  out << csv;
}

void GenSyntheticCmd(const Options& o, std::ostream& out) {
  Require(o.out, "--out");
  const ClusterSpec spec{o.classes, o.dim, o.per_class, o.sigma, SeedOr(o, 0)};
  if (!o.queries_out.empty()) {
    const ClusterBenchmarkData data = GenClusterBenchmark(spec, o.queries_per_class);
    SaveBank(data.train, o.out);
    SaveBank(data.queries, o.queries_out);
  } else {
    SaveBank(GenClusterBank(spec), o.out);
  }
  if (!o.vocab_out.empty()) SaveVocabulary(GenClusterVocabulary(spec), o.vocab_out);
  EchoSeed(out, spec.seed);
  out << "classes: " << spec.classes << " dim: " << spec.dim << " per class: " << spec.per_class
      << "\n";
}

void GenFixtureCmd(const Options& o, std::ostream& out) {
  Require(o.out, "--out");
  std::vector<std::string> names;
  if (o.fixture_case == "all") {
    names = DetectionFixtureNames();
  } else {
    names.push_back(o.fixture_case);
  }
  for (const std::string& name : names) {
    const DetectionFixture f = GenDetectionFixture(name);
    const fs::path dir = fs::path(o.out) / name;
    fs::create_directories(dir);
    SaveVocabulary(f.vocab, dir / "vocab.jsonl");
    WriteFileAtomic(dir / "detections.jsonl", DetectionsToJsonl(f.detections));
    WriteFileAtomic(dir / "groundtruth.jsonl", GroundTruthToJsonl(f.groundtruth));
    WriteFileAtomic(dir / "expected.json", EvalResultToJson(f.expected));
    out << name << "\n";
  }
  EchoSeed(out, SeedOr(o, 0));
}

void ShowConfigCmd(const Options& o, std::ostream& out) {
  TrainConfig c;
  if (o.preset == "benchmark") {
    c = DefaultRetrievalBenchmark(SeedOr(o, 0)).train;
  } else if (o.preset != "default") {
    throw ConfigError("--preset must be default or benchmark");
  } else if (o.seed) {
    c.seed = c.model.seed = *o.seed;
  }
  const std::string text = TrainConfigToJson(c);
  if (o.out.empty()) {
    out << text;
  } else {
    WriteFileAtomic(o.out, text);
    EchoSeed(out, c.seed);
  }
}

CLI::App* AddCommand(CLI::App& app, const char* name, const char* help, Options& o) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--seed", o.seed, "Random seed (echoed to stdout)");
  return sub;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Open-vocabulary classifier construction and evaluation", "ovc"};
  app.require_subcommand(1);
  Options o;

  auto* resolve = AddCommand(app, "resolve-exemplars", "Select image exemplars per class", o);
  resolve->add_option("--vocab", o.vocab, "Vocabulary JSONL");
  resolve->add_option("--pools", o.pools, "Candidate pools JSON");
  resolve->add_option("--out", o.out, "Catalog JSON");
  resolve->add_option("--min-full", o.min_full);
  resolve->add_option("--min-reduced", o.min_reduced);
  resolve->add_option("--min-box-area", o.min_box_area);

  auto* text = AddCommand(app, "build-text", "Text classifiers from description embeddings", o);
  text->add_option("--descriptions", o.descriptions, "Descriptions JSONL");
  text->add_option("--bank", o.bank, "Output classifier bank (.ovcb)");
  text->add_option("--out", o.out, "Same as --bank");
  text->add_option("--vocab", o.vocab, "Vocabulary JSONL to validate against");
  text->add_option("--prompt-template", o.prompt_template, "Prompt pattern with {class name}");
  text->add_option("--prompts-out", o.prompts_out, "Write rendered prompts JSONL");

  auto* train = AddCommand(app, "train-aggregator", "Contrastive training of the aggregator", o);
  train->add_option("--config", o.config, "Train config JSON");
  train->add_option("--bank", o.bank, "Exemplar embedding bank (.oveb)");
  train->add_option("--out", o.out, "Checkpoint (.ovag), rewritten every epoch");
  train->add_option("--vocab", o.vocab, "Vocabulary JSONL to validate against");
  train->add_option("--k", o.k, "Override max_k");
  train->add_option("--epochs", o.epochs, "Override epochs");
  train->add_option("--report", o.report, "Report JSON (default <out>.report.json)");
  train->add_option("--report-csv", o.report_csv, "Per-epoch loss CSV (default <out>.loss.csv)");
  train->add_option("--checkpoint-dir", o.checkpoint_dir, "Keep one checkpoint per epoch");

  auto* visual = AddCommand(app, "build-visual", "Visual classifiers from exemplars", o);
  visual->add_option("--bank", o.bank, "Exemplar embedding bank (.oveb)");
  visual->add_option("--model", o.model, "Aggregator checkpoint (vision-agg)");
  visual->add_option("--modality", o.modality, "vision-agg | vision-mean");
  visual->add_option("--k", o.k, "Exemplars per class (0 = all)");
  visual->add_option("--out", o.out, "Output classifier bank (.ovcb)");

  auto* fuse = AddCommand(app, "fuse", "Multimodal classifiers from text and visual banks", o);
  fuse->add_option("--text", o.text, "Text classifier bank");
  fuse->add_option("--visual", o.visual, "Visual classifier bank");
  fuse->add_option("--out", o.out, "Output classifier bank");

  auto* tta = AddCommand(app, "plan-tta", "Augmentation jobs for catalog exemplars", o);
  tta->add_option("--catalog", o.catalog, "Catalog JSON from resolve-exemplars");
  tta->add_option("--recipe", o.recipe, "none | harsh | gentle");
  tta->add_option("--variants", o.variants, "Augmentations per exemplar");
  tta->add_option("--out", o.out, "Jobs JSONL");

  auto* eval = AddCommand(app, "eval", "Retrieval accuracy or box AP", o);
  eval->add_option("--bank", o.bank, "Classifier bank (.ovcb)");
  eval->add_option("--queries", o.queries, "Query or region features (.oveb)");
  eval->add_option("--model", o.model, "Map queries through this aggregator");
  eval->add_option("--regions", o.regions, "Region JSONL (image, box per region id)");
  eval->add_option("--detections", o.detections, "Detections JSONL");
  eval->add_option("--gt", o.gt, "Ground truth JSONL");
  eval->add_option("--vocab", o.vocab, "Vocabulary JSONL (frequency buckets)");
  eval->add_option("--logit-scale", o.logit_scale, "Cosine scale (default 50)");
  eval->add_option("--bias", o.bias, "Score bias (default -2)");
  eval->add_flag("--include-empty-classes", o.include_empty, "Count classes without GT as AP 0");
  eval->add_option("--out", o.out, "EvalResult JSON");

  auto* sweep = AddCommand(app, "sweep-k", "Aggregator vs mean baseline over K", o);
  sweep->add_option("--bank", o.bank, "Training bank (.oveb)");
  sweep->add_option("--queries", o.queries, "Held-out query bank (.oveb)");
  sweep->add_option("--config", o.config, "Train config JSON (default: benchmark preset)");
  sweep->add_option("--ks", o.ks, "Comma-separated K values");
  sweep->add_option("--epochs", o.epochs, "Override epochs");
  sweep->add_option("--logit-scale", o.logit_scale);
  sweep->add_option("--bias", o.bias);
  sweep->add_option("--out", o.out, "CSV output");

  auto* gen = AddCommand(app, "gen-synthetic", "Gaussian cluster embedding banks", o);
  gen->add_option("--classes", o.classes);
  gen->add_option("--dim", o.dim);
  gen->add_option("--per-class", o.per_class);
  gen->add_option("--sigma", o.sigma);
  gen->add_option("--queries-per-class", o.queries_per_class);
  gen->add_option("--out", o.out, "Training bank (.oveb)");
  gen->add_option("--queries-out", o.queries_out, "Held-out query bank (.oveb)");
  gen->add_option("--vocab-out", o.vocab_out, "Vocabulary JSONL");

  auto* fixture = AddCommand(app, "gen-fixture", "Detection fixtures with expected AP", o);
  fixture->add_option("--case", o.fixture_case, "Fixture name or 'all'");
  fixture->add_option("--out", o.out, "Output directory");

  auto* show = AddCommand(app, "show-config", "Print a train config JSON", o);
  show->add_option("--preset", o.preset, "default | benchmark");
  show->add_option("--out", o.out, "Write to file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* sub = nullptr;
    for (CLI::App* s : app.get_subcommands()) sub = s;
    err << (sub != nullptr ? sub->help() : app.help());
    return kExitError;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "resolve-exemplars") ResolveCmd(o, out);
    else if (name == "build-text") BuildTextCmd(o, out);
    else if (name == "train-aggregator") TrainCmd(o, out);
    else if (name == "build-visual") BuildVisualCmd(o, out);
    else if (name == "fuse") FuseCmd(o, out);
    else if (name == "plan-tta") PlanTtaCmd(o, out);
    else if (name == "eval") EvalCmd(o, out);
    else if (name == "sweep-k") SweepCmd(o, out);
    else if (name == "gen-synthetic") GenSyntheticCmd(o, out);
    else if (name == "gen-fixture") GenFixtureCmd(o, out);
    else if (name == "show-config") ShowConfigCmd(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Run(args, std::cout, std::cerr);
}

}  // namespace ovc::cli
