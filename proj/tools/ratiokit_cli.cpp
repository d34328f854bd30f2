// ratiokit command-line front end.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ratiokit/errors.hpp"
#include "ratiokit/io.hpp"
#include "ratiokit/null_model.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;

using ratiokit::InputError;

ratiokit::SequenceKind parse_kind(const std::string& kind) {
  if (kind == "onsets") return ratiokit::SequenceKind::Onsets;
  if (kind == "intervals") return ratiokit::SequenceKind::Intervals;
  throw InputError("--kind must be 'onsets' or 'intervals'");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

std::string digits17(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integer-ratio rhythm analysis: ratios, null models, normalized bin counts and tests"};
  app.require_subcommand(1);

  // Shared option storage.
  std::string input;
  std::string kind = "intervals";
  std::string transform = "r";
  std::string null_spec;
  std::string layout = "one-to-one";
  std::string normalizer = "width";
  std::optional<std::uint64_t> seed;
  std::string out;
  double max_gap = 0.0;
  bool separate_off = false;
  bool include_ratios = false;
  bool no_ks = false;
  std::size_t n_sequences = 1000;
  std::size_t seq_len = 1000;
  std::size_t grid = 512;
  std::size_t samples = 100000;
  std::size_t bins = 100;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input", input, "Sequences CSV")->required();
    cmd->add_option("--kind", kind, "onsets | intervals")->capture_default_str();
    cmd->add_option("--max-gap", max_gap, "Split sequences at intervals longer than this (s)");
  };
  auto add_pipeline = [&](CLI::App* cmd) {
    cmd->add_option("--transform", transform, "q | r | rescale-plus | rescale-minus")
        ->capture_default_str();
    cmd->add_option("--null", null_spec,
                    "exponential:RATE | uniform:A,B | halfnormal:SIGMA | table:PATH (seconds)");
    cmd->add_option("--layout", layout, "one-to-one | thirds:M:N,... | edges:E1,E2,...")
        ->capture_default_str();
    cmd->add_option("--normalizer", normalizer, "width | mass | mass-mc:N")->capture_default_str();
  };

  auto* simulate = app.add_subcommand("simulate", "Sample i.i.d. interval sequences from a null model");
  simulate->add_option("--null", null_spec, "Null model spec")->required();
  simulate->add_option("--sequences", n_sequences, "Number of sequences")->capture_default_str();
  simulate->add_option("--length", seq_len, "Intervals per sequence")->capture_default_str();
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--out", out, "Output CSV")->required();

  auto* ratios = app.add_subcommand("ratios", "Adjacent-interval ratios per sequence");
  add_input(ratios);
  ratios->add_option("--transform", transform, "q | r | rescale-plus | rescale-minus")
      ->capture_default_str();
  ratios->add_option("--null", null_spec, "Null model for rescaled transforms");
  ratios->add_option("--out", out, "Output CSV (default stdout)");

  auto* normalize = app.add_subcommand("normalize", "Normalized on/off bin counts per sequence");
  add_input(normalize);
  add_pipeline(normalize);
  normalize->add_option("--seed", seed, "Master seed");
  normalize->add_option("--out", out, "Report JSON (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "Bin counts, normalization and tests");
  add_input(analyze);
  add_pipeline(analyze);
  analyze->add_option("--seed", seed, "Master seed");
  analyze->add_option("--out", out, "Report JSON (default stdout)");
  analyze->add_flag("--separate-off", separate_off, "Test the on bin against each off bin");
  analyze->add_flag("--include-ratios", include_ratios, "Embed per-sequence ratios in the report");
  analyze->add_flag("--no-ks", no_ks, "Skip the Kolmogorov-Smirnov test");

  auto* curves = app.add_subcommand("curves", "Analytic and sampled ratio densities for plotting");
  curves->add_option("--null", null_spec, "Null model spec")->required();
  curves->add_option("--transform", transform, "q | r | rescale-plus | rescale-minus")
      ->capture_default_str();
  curves->add_option("--grid", grid, "Analytic grid points (>= 64)")->capture_default_str();
  curves->add_option("--samples", samples, "Sampled ratios for the histogram")->capture_default_str();
  curves->add_option("--bins", bins, "Histogram bins")->capture_default_str();
  curves->add_option("--seed", seed, "Sampling seed");
  curves->add_option("--out", out, "Output prefix: PREFIX_analytic.csv, PREFIX_histogram.csv, PREFIX.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const std::uint64_t master = seed ? *seed : ratiokit::fresh_seed();
    std::optional<ratiokit::NullModel> model;
    if (!null_spec.empty()) model = ratiokit::parse_null_spec(null_spec);
    ratiokit::LoadOptions load;
    if (max_gap > 0.0) load.max_gap = max_gap;

    if (*simulate) {
      ratiokit::simulate_command(*model, n_sequences, seq_len, master, out);
      std::cerr << "wrote " << n_sequences << " sequences (seed " << master << ") to " << out << "\n";
    } else if (*ratios) {
      const auto loaded = ratiokit::load_sequences(input, parse_kind(kind), load);
      const auto t = ratiokit::parse_transform(transform, model);
      std::string text = "sequence_id,index,ratio\n";
      for (const auto& seq : loaded.sequences) {
        const auto r = ratiokit::sequence_ratios(seq, t);
        for (std::size_t k = 0; k < r.size(); ++k) {
          text += seq.source_id() + "," + std::to_string(k) + "," + digits17(r[k]) + "\n";
        }
      }
      write_text(out, text);
      if (loaded.skipped > 0) std::cerr << "skipped " << loaded.skipped << " short sequences\n";
    } else if (*normalize || *analyze) {
      ratiokit::AnalysisConfig config;
      config.input = input;
      config.kind = parse_kind(kind);
      config.transform = transform;
      if (!null_spec.empty()) config.null_spec = null_spec;
      config.layout = layout;
      config.normalizer = normalizer;
      config.seed = master;
      config.load = load;
      config.separate_off = separate_off;
      config.include_ratios = include_ratios;
      config.wilcoxon = analyze->parsed();
      config.ks = analyze->parsed() && !no_ks;
      const auto report = ratiokit::run_analysis(config);
      write_text(out, report.dump(2) + "\n");
    } else if (*curves) {
      const auto t = ratiokit::parse_transform(transform, model);
      const auto set = ratiokit::emit_density_curves(*model, t, grid, samples, bins, master);
      ratiokit::write_curve_csv(out + "_analytic.csv", set.analytic);
      ratiokit::write_curve_csv(out + "_histogram.csv", set.histogram);
      nlohmann::ordered_json meta;
      meta["schema"] = ratiokit::kReportSchema;
      meta["null_model"] = set.model;
      meta["transform"] = set.transform;
      meta["seed"] = master;
      meta["curves"] = {{"analytic", ratiokit::curve_metadata(set.analytic)},
                        {"histogram", ratiokit::curve_metadata(set.histogram)}};
      write_text(out + ".json", meta.dump(2) + "\n");
    }
  } catch (const ratiokit::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (best estimate " << e.best_estimate() << ")\n";
    return kExitNonConvergence;
  } catch (const ratiokit::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ratiokit::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
