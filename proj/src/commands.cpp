#include "phaseret/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "phaseret/certify.hpp"
#include "phaseret/errors.hpp"
#include "phaseret/io.hpp"
#include "phaseret/rng.hpp"

namespace phaseret::cli {

namespace {

using io::json;

struct Options {
  Tolerances tol;
  std::size_t restarts = 64;
  std::size_t iters = 500;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string report_path;

  std::string input;
  std::string witness_input;
  std::size_t cp_cap = 24;
  double spark_cap = 5e6;
  std::string mode = "spanning";
  std::string step = "alternating";

  std::string kind;
  std::string field = "real";
  long long n = 0;
  long long m = 0;
  std::string ranks;
  std::size_t spot_checks = 1000;

  std::string n_range = "2:4";
  std::string m_range = "2:8";
  std::size_t trials = 100;
};

struct Outcome {
  int code = kExitHolds;
  json result;
};

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("PHASERET_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InputDomainError("PHASERET_SEED: expected an unsigned integer");
    }
  }
  return 0;
}

SearchConfig search_config(const Options& o, std::uint64_t seed) {
  SearchConfig cfg;
  cfg.restarts = o.restarts;
  cfg.max_iters = o.iters;
  cfg.seed = seed;
  cfg.tol = o.tol;
  cfg.spot_checks = o.spot_checks;
  if (o.step == "gradient") cfg.step = StepPolicy::ProjectedGradient;
  return cfg;
}

Field parse_field_name(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw InputDomainError("--field: expected real or complex");
}

std::pair<long long, long long> parse_range(const std::string& s, const char* flag) {
  try {
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
      const long long v = std::stoll(s);
      return {v, v};
    }
    return {std::stoll(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw InputDomainError(std::string(flag) + ": expected N or A:B");
  }
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(3) << v;
  return ss.str();
}

Frame load_frame(const Options& o) {
  return io::parse_frame(io::read_file(o.input), io::looks_like_csv(o.input), o.tol);
}

ProjectionFamily load_family(const Options& o) {
  return io::parse_family(io::read_file(o.input), io::looks_like_csv(o.input), o.tol);
}

Outcome cmd_check_cp(const Options& o, std::ostream& out) {
  const Frame f = load_frame(o);
  EnumerationLimits limits;
  limits.cp_max_vectors = o.cp_cap;
  const auto r = complement_property(f, o.tol, limits);
  Outcome res;
  res.result = {{"complement_property", r.holds() ? "holds" : "fails"}, {"m", f.size()}, {"n", f.dim()}};
  if (r.holds()) {
    out << "holds\n";
    return res;
  }
  const auto& w = *r.witness;
  res.result["partition"] = io::partition_to_json(w, f.size());
  out << "fails, I = " << io::index_set(w.side_I) << ", I^c = " << io::index_set(w.side_Ic(f.size()))
      << " (rank " << w.rank_I << " vs " << w.rank_Ic << ")\n";
  res.code = kExitFails;
  return res;
}

Outcome cmd_check_spark(const Options& o, std::ostream& out) {
  const Frame f = load_frame(o);
  EnumerationLimits limits;
  limits.spark_max_subsets = o.spark_cap;
  const auto r = full_spark(f, o.tol, limits);
  Outcome res;
  res.result = {{"full_spark", r.holds() ? "holds" : "fails"}, {"m", f.size()}, {"n", f.dim()}};
  if (r.holds()) {
    out << "holds\n";
    return res;
  }
  json subset = json::array();
  for (auto i : *r.failing_subset) subset.push_back(i + 1);
  res.result["failing_subset"] = subset;
  out << "fails, subset " << io::index_set(*r.failing_subset) << " is rank deficient\n";
  res.code = kExitFails;
  return res;
}

void print_verdict(const Verdict& v, std::ostream& out) {
  out << to_string(v.status) << " (" << v.method << ")\n";
  if (v.partition)
    out << "  I = " << io::index_set(v.partition->side_I) << " (rank " << v.partition->rank_I << " vs "
        << v.partition->rank_Ic << ")\n";
  if (v.point) out << "  x = " << io::column_to_json(*v.point).dump() << "\n";
  if (v.pr_witness) {
    out << "  u = " << io::column_to_json(v.pr_witness->u).dump() << "\n";
    out << "  v = " << io::column_to_json(v.pr_witness->v).dump() << "\n";
    out << "  max_mismatch = " << fmt(v.pr_witness->max_mismatch) << ", phase_gap = " << fmt(v.pr_witness->phase_gap)
        << "\n";
  }
}

int verdict_code(Status s) {
  switch (s) {
    case Status::CertifiedHolds: return kExitHolds;
    case Status::CertifiedFails:
    case Status::Falsified: return kExitFails;
    case Status::NoWitnessFound: return kExitInconclusive;
  }
  return kExitError;
}

Outcome cmd_falsify(const Options& o, std::uint64_t seed, std::ostream& out) {
  const auto family = load_family(o);
  const auto cfg = search_config(o, seed);
  Verdict v;
  if (o.mode == "spanning") {
    v = spanning_falsifier(family, cfg);
  } else if (o.mode == "pr") {
    v = pr_falsifier(family, cfg);
  } else {
    throw InputDomainError("--mode: expected spanning or pr");
  }
  print_verdict(v, out);
  return {verdict_code(v.status), {{"mode", o.mode}, {"verdict", io::verdict_to_json(v, family.size())}}};
}

void emit_object(const Options& o, const json& obj, std::ostream& out) {
  if (o.out_path.empty()) {
    out << obj.dump(2) << "\n";
  } else {
    io::write_file(o.out_path, obj.dump(2) + "\n");
  }
}

Outcome cmd_gen(const Options& o, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  // With no --out the object goes to stdout and the summary to stderr.
  std::ostream& summary = o.out_path.empty() ? err : out;
  Outcome res;
  if (o.kind == "full-spark") {
    if (o.n < 1 || o.m < o.n) throw InputDomainError("gen full-spark: need 1 <= n <= m");
    const Frame f = gen_full_spark(o.n, o.m, parse_field_name(o.field));
    emit_object(o, io::frame_to_json(f), out);
    summary << "full-spark " << o.field << " frame n = " << o.n << ", m = " << o.m << ": full spark "
            << (full_spark(f, o.tol).holds() ? "holds" : "fails") << "\n";
    res.result = {{"kind", o.kind}, {"frame", io::frame_to_json(f)}};
    return res;
  }
  if (o.kind == "counterexample") {
    if (o.n < 2) throw InputDomainError("gen counterexample: need n >= 2");
    const auto ce = complex_counterexample(o.n, search_config(o, seed));
    json obj = io::frame_to_json(ce.frame);
    obj["spanning_report"] = {{"full_spark", ce.spanning.full_spark},
                              {"spot_checks", ce.spanning.spot_checks},
                              {"spot_passes", ce.spanning.spot_passes},
                              {"min_nonzero_products", ce.spanning.min_nonzero_products}};
    obj["status"] = to_string(ce.status);
    obj["method"] = ce.method;
    if (ce.witness) obj["witness"] = io::witness_to_json(*ce.witness);
    emit_object(o, obj, out);
    summary << "counterexample n = " << o.n << ": " << ce.frame.size() << " vectors, full spark "
            << (ce.spanning.full_spark ? "holds" : "fails") << ", spanning spot check " << ce.spanning.spot_passes << "/"
            << ce.spanning.spot_checks << ", " << to_string(ce.status);
    if (ce.witness)
      summary << ", witness max_mismatch = " << fmt(ce.witness->max_mismatch)
              << ", phase_gap = " << fmt(ce.witness->phase_gap);
    summary << "\n";
    res.result = obj;
    res.code = ce.witness ? kExitHolds : kExitInconclusive;
    return res;
  }
  if (o.kind == "random-proj") {
    std::vector<Index> ranks;
    std::stringstream ss(o.ranks);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        ranks.push_back(static_cast<Index>(std::stoll(tok)));
      } catch (const std::exception&) {
        throw InputDomainError("--ranks: expected comma-separated integers");
      }
    }
    if (o.n < 1) throw InputDomainError("gen random-proj: need n >= 1");
    const auto p = gen_random_projections(o.n, ranks, parse_field_name(o.field), seed, o.tol);
    emit_object(o, io::family_to_json(p), out);
    summary << "random-proj " << o.field << " n = " << o.n << ", " << p.size() << " projections, seed " << seed << "\n";
    res.result = {{"kind", o.kind}, {"family", io::family_to_json(p)}};
    return res;
  }
  throw InputDomainError("--kind: expected full-spark, counterexample or random-proj");
}

Outcome cmd_survey(const Options& o, std::uint64_t seed, std::ostream& out) {
  if (o.trials < 1) throw InputDomainError("survey: trials must be >= 1");
  const Field field = parse_field_name(o.field);
  const auto [n_lo, n_hi] = parse_range(o.n_range, "--n");
  const auto [m_lo, m_hi] = parse_range(o.m_range, "--m");
  if (n_lo < 1 || n_hi < n_lo || m_lo < 1 || m_hi < m_lo) throw InputDomainError("survey: empty or invalid range");
  auto cfg = search_config(o, seed);
  std::ostringstream csv;
  csv << "n,m,field,trials,rate,mean_runtime,note\n";
  json cells = json::array();
  std::uint64_t cell_index = 0;
  for (long long n = n_lo; n <= n_hi; ++n) {
    for (long long m = m_lo; m <= m_hi; ++m, ++cell_index) {
      std::size_t hits = 0;
      double seconds = 0.0;
      std::string note;
      try {
        for (std::size_t t = 0; t < o.trials; ++t) {
          const auto trial_seed = derive_seed(seed, Stream::Survey, cell_index * 1000003ULL + t);
          const auto start = std::chrono::steady_clock::now();
          const Frame f = gen_random_frame(n, m, field, trial_seed);
          if (field == Field::Real) {
            if (decide_real_rank1(f, o.tol).status == Status::CertifiedHolds) ++hits;
          } else {
            auto trial_cfg = cfg;
            trial_cfg.seed = trial_seed;
            if (pr_falsifier(ProjectionFamily::rank_one(f, o.tol), trial_cfg).status == Status::Falsified) ++hits;
          }
          seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
      } catch (const CapacityError& e) {
        note = e.what();
      }
      csv << n << "," << m << "," << to_string(field) << "," << o.trials << ",";
      json cell = {{"n", n}, {"m", m}, {"trials", o.trials}};
      if (note.empty()) {
        const double rate = static_cast<double>(hits) / static_cast<double>(o.trials);
        csv << std::fixed << std::setprecision(6) << rate << "," << std::scientific << std::setprecision(3)
            << seconds / static_cast<double>(o.trials) << std::defaultfloat << ",\n";
        cell["rate"] = rate;
      } else {
        csv << "NA,NA,\"" << note << "\"\n";
        cell["rate"] = nullptr;
        cell["note"] = note;
      }
      cells.push_back(cell);
    }
  }
  if (o.out_path.empty()) {
    out << csv.str();
  } else {
    io::write_file(o.out_path, csv.str());
  }
  return {kExitHolds, {{"cells", cells}, {"measure", field == Field::Real ? "certified_holds" : "witness_found"}}};
}

Outcome cmd_verify(const Options& o, std::ostream& out) {
  const auto family = load_family(o);
  const auto [u, v] = io::parse_witness(io::read_file(o.witness_input), family.field(), family.dim());
  const auto check = verify_pr_witness(family, u, v, o.tol);
  out << (check.valid ? "valid" : "invalid") << " (max_mismatch = " << fmt(check.max_mismatch)
      << ", phase_gap = " << fmt(check.phase_gap) << ")\n";
  return {check.valid ? kExitHolds : kExitFails,
          {{"valid", check.valid}, {"max_mismatch", check.max_mismatch}, {"phase_gap", check.phase_gap}}};
}

json config_json(const Options& o, std::uint64_t seed) {
  return {{"tol_rank", o.tol.rank_rtol}, {"tol_proj", o.tol.proj_tol},  {"tol_witness", o.tol.witness_tol},
          {"tol_phase", o.tol.phase_tol}, {"restarts", o.restarts},      {"iters", o.iters},
          {"seed", seed},                 {"step", o.step}};
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Certify and falsify phase retrieval for frames and projection families", "phaseret"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol-rank", o.tol.rank_rtol, "relative singular-value cutoff");
  app.add_option("--tol-proj", o.tol.proj_tol, "projector validation bound");
  app.add_option("--tol-witness", o.tol.witness_tol, "measurement mismatch bound");
  app.add_option("--tol-phase", o.tol.phase_tol, "phase-equivalence bound");
  app.add_option("--restarts", o.restarts, "search restarts");
  app.add_option("--iters", o.iters, "iterations per restart");
  app.add_option("--seed", o.seed, "master seed (falls back to PHASERET_SEED, then 0)");
  app.add_option("--out", o.out_path, "output file for generated objects and survey tables");
  app.add_option("--report", o.report_path, "write a JSON run report to this file");

  auto* cp = app.add_subcommand("check-cp", "complement property of a frame");
  cp->add_option("input", o.input, "frame file (.json or .csv)")->required();
  cp->add_option("--cap", o.cp_cap, "maximum number of vectors to enumerate");

  auto* spark = app.add_subcommand("check-spark", "full spark of a frame");
  spark->add_option("input", o.input, "frame file (.json or .csv)")->required();
  spark->add_option("--cap", o.spark_cap, "maximum number of n-subsets to enumerate");

  auto* falsify = app.add_subcommand("falsify", "search for a phase retrieval failure");
  falsify->add_option("input", o.input, "projection or frame file")->required();
  falsify->add_option("--mode", o.mode, "spanning | pr");
  falsify->add_option("--step", o.step, "alternating | gradient");

  auto* gen = app.add_subcommand("gen", "generate frames and projection families");
  gen->add_option("--kind", o.kind, "full-spark | counterexample | random-proj")->required();
  gen->add_option("--n", o.n, "dimension")->required();
  gen->add_option("--m", o.m, "number of vectors (full-spark)");
  gen->add_option("--ranks", o.ranks, "comma-separated ranks (random-proj)");
  gen->add_option("--field", o.field, "real | complex");
  gen->add_option("--spot-checks", o.spot_checks, "random points for the spanning spot check");

  auto* survey = app.add_subcommand("survey", "Monte-Carlo rate table over (n, m)");
  survey->add_option("--n", o.n_range, "N or A:B");
  survey->add_option("--m", o.m_range, "M or A:B");
  survey->add_option("--field", o.field, "real | complex");
  survey->add_option("--trials", o.trials, "frames per cell");

  auto* verify = app.add_subcommand("verify-witness", "check a witness pair against a family");
  verify->add_option("input", o.input, "projection or frame file")->required();
  verify->add_option("witness", o.witness_input, "witness file with u and v")->required();

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    o.tol.validate();
    const std::uint64_t seed = resolve_seed(o);
    Outcome res;
    std::string name;
    if (*cp) {
      name = "check-cp";
      res = cmd_check_cp(o, out);
    } else if (*spark) {
      name = "check-spark";
      res = cmd_check_spark(o, out);
    } else if (*falsify) {
      name = "falsify";
      res = cmd_falsify(o, seed, out);
    } else if (*gen) {
      name = "gen";
      res = cmd_gen(o, seed, out, err);
    } else if (*survey) {
      name = "survey";
      res = cmd_survey(o, seed, out);
    } else {
      name = "verify-witness";
      res = cmd_verify(o, out);
    }
    if (!o.report_path.empty()) {
      json report = {{"command", std::vector<std::string>(argv.begin() + 1, argv.end())},
                     {"subcommand", name},
                     {"config", config_json(o, seed)},
                     {"exit_code", res.code},
                     {"result", res.result},
                     {"version", PHASERET_VERSION},
                     {"wall_time_s",
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
      io::write_file(o.report_path, report.dump(2) + "\n");
    }
    return res.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace phaseret::cli
