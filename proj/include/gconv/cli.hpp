#pragma once

#include <algorithm>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gconv/calculus.hpp"
#include "gconv/conv.hpp"
#include "gconv/csv.hpp"
#include "gconv/fastpath.hpp"
#include "gconv/laws.hpp"
#include "gconv/mollify.hpp"

namespace gconv::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kBadInput = 2,
  kDimensionMismatch = 3,
  kGridTooCoarse = 4,
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch:
      return kDimensionMismatch;
    case ErrorKind::GridTooCoarse:
      return kGridTooCoarse;
    default:
      return kBadInput;
  }
}

struct Config {
  std::vector<std::string> inputs;
  std::string group;
  std::string measure;
  std::string pairing = "mul";
  std::string variant = "std";
  bool fast = false;
  std::optional<double> tol;
  int order = 1;
  std::vector<double> study;
  std::optional<double> radius;
  std::vector<std::int64_t> x0;
  std::vector<std::size_t> sizes{1024, 4096, 16384};
  int trials = 3;
  std::string verify;
  std::string output;
  std::string report;
  std::string format = "csv";
};

namespace detail {

using Json = nlohmann::json;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  Json json;
};

inline std::string num(double v) { return gconv::detail::format_real(v); }

inline std::string render(const Table& t, const std::string& format) {
  if (format == "json") return t.json.dump(2) + "\n";
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
    s += '\n';
  }
  return s;
}

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    csv::write_file_atomic(path, content);
  }
}

inline SampledFunction load(const std::string& path, const Config& cfg) {
  auto f = csv::read_file(path);
  if (!cfg.group.empty()) {
    const GroupSpace want = csv::parse_group(cfg.group);
    require(f.group() == want, ErrorKind::SpaceMismatch,
            path + ": file declares group " + f.group().to_string() + " but --group is " + want.to_string());
  }
  return f;
}

inline Measure make_measure(const Config& cfg, const GroupSpace& G) {
  const std::string kind = cfg.measure.empty() ? (G.kind() == GroupKind::Lattice ? "grid" : "counting") : cfg.measure;
  if (kind == "grid") {
    require(G.kind() == GroupKind::Lattice, ErrorKind::InvalidArgument,
            "--measure grid needs a lattice group, got " + G.to_string());
    return Measure::grid_volume(G);
  }
  return Measure::counting(G);
}

inline Pairing make_pairing(const std::string& spec) {
  if (spec == "mul") return Pairing::mul();
  if (spec.starts_with("smul:")) {
    std::size_t m = 0;
    if (csv::detail::parse_number(std::string_view(spec).substr(5), m) && m >= 1) return Pairing::scalar_smul(m);
  }
  fail(ErrorKind::InvalidArgument, "--pairing must be mul or smul:<m>, got '" + spec + "'");
}

inline ConvRequest make_request(const Config& cfg, SampledFunction f, SampledFunction g) {
  require(f.group() == g.group(), ErrorKind::SpaceMismatch,
          "inputs live on different groups: " + f.group().to_string() + " vs " + g.group().to_string());
  const GroupSpace G = f.group();
  ConvRequest r{std::move(f), std::move(g), make_pairing(cfg.pairing), make_measure(cfg, G),
                cfg.variant == "alt" ? Variant::NonabelianAlt : Variant::Standard};
  r.validate();
  return r;
}

inline GroupPoint make_point(const GroupSpace& G, const std::vector<std::int64_t>& coords) {
  if (coords.empty()) return G.zero();
  require(coords.size() == G.rank(), ErrorKind::DimensionMismatch,
          "--x0 needs " + std::to_string(G.rank()) + " indices");
  const GroupPoint p{std::span<const std::int64_t>(coords)};
  G.check(p);
  return p;
}

inline int cmd_conv(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto r = make_request(cfg, load(cfg.inputs[0], cfg), load(cfg.inputs[1], cfg));
  SampledFunction result(r.group(), r.pairing.dim_f());
  if (cfg.fast) {
    if (!fast_path_applicable(r)) err << "note: request is not eligible for the fast path; using the direct sum\n";
    result = convolve_auto(r);
  } else {
    result = convolve(r);
  }
  emit(cfg.output, csv::write(result), out);
  return kOk;
}

inline Table study_table(const ConvergenceReport& rep) {
  Table t{{"radius", "distance", "bound", "modulus", "within_bound"}, {}, {}};
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    t.rows.push_back({num(rep.radii[i]), num(rep.distances[i]), num(rep.bounds[i]), num(rep.moduli[i]),
                      rep.within_bound[i] ? "true" : "false"});
  }
  t.json = Json{{"radii", rep.radii},           {"distances", rep.distances}, {"bounds", rep.bounds},
                {"moduli", rep.moduli},         {"slack", rep.slack},         {"lipschitz", rep.lipschitz},
                {"monotone", rep.monotone},     {"converged", rep.converged}, {"pass", rep.pass}};
  t.json["within_bound"] = std::vector<bool>(rep.within_bound.begin(), rep.within_bound.end());
  if (rep.target) t.json["target"] = *rep.target;
  return t;
}

inline int cmd_mollify(const Config& cfg, std::ostream& out, std::ostream&) {
  require(cfg.radius || !cfg.study.empty(), ErrorKind::InvalidArgument, "mollify needs -R and/or --study");
  require(!(cfg.radius && !cfg.study.empty() && cfg.output.empty() && cfg.report.empty()),
          ErrorKind::InvalidArgument, "with both -R and --study, send at least one of them to a file (-o/--report)");
  const auto g = load(cfg.inputs[0], cfg);
  const GroupSpace& G = g.group();
  require(G.kind() == GroupKind::Lattice, ErrorKind::InvalidArgument, "mollify needs a lattice input");
  require(cfg.measure.empty() || cfg.measure == "grid", ErrorKind::InvalidArgument, "mollify uses --measure grid");
  const auto mu = Measure::grid_volume(G);

  int code = kOk;
  if (!cfg.study.empty()) {
    StudyOptions opts;
    opts.target = cfg.tol;
    const auto rep = convergence_study(g, make_point(G, cfg.x0), cfg.study, mu, opts);
    emit(cfg.report, render(study_table(rep), cfg.format), out);
    if (!rep.pass) code = kCheckFailed;
  }
  if (cfg.radius) {
    const auto smooth = mollify(g, BumpSpec{*cfg.radius, G.rank(), G.spacing()}, mu);
    emit(cfg.output, csv::write(smooth), out);
  }
  return code;
}

inline int cmd_laws(const Config& cfg, std::ostream& out, std::ostream&) {
  require(cfg.inputs.size() <= 2, ErrorKind::InvalidArgument, "laws takes one or two inputs");
  const double tol = cfg.tol.value_or(1e-10);
  auto f = load(cfg.inputs[0], cfg);
  auto g = cfg.inputs.size() == 2 ? load(cfg.inputs[1], cfg) : f;
  const auto r = make_request(cfg, f, g);

  std::vector<LawCheck> checks;
  checks.push_back(check_scalar_law(r, 2.5, tol));
  checks.push_back(check_additivity_right(r, reflect(r.g), tol));
  checks.push_back(check_additivity_left(r, reflect(r.f), tol));
  checks.push_back(check_commutativity(r, tol));
  checks.push_back(check_integral_identity(r, tol));
  checks.push_back(check_fubini(r, tol));
  if (!cfg.verify.empty()) {
    const auto claimed = csv::read_file(cfg.verify);
    require(claimed.group() == r.group(), ErrorKind::SpaceMismatch, cfg.verify + ": group differs from the inputs");
    require(claimed.vdim() == r.pairing.dim_f(), ErrorKind::DimensionMismatch,
            cfg.verify + ": vdim differs from the convolution output");
    const auto actual = convolve(r);
    LawCheck c;
    c.name = "verify " + cfg.verify;
    c.lhs = max_abs_value(claimed);
    c.rhs = max_abs_value(actual);
    c.deviation = relative_deviation(claimed, actual);
    c.status = c.deviation <= tol ? CheckStatus::Pass : CheckStatus::Fail;
    checks.push_back(c);
  }

  Table t{{"check", "status", "lhs", "rhs", "deviation", "note"}, {}, Json::array()};
  bool failed = false;
  for (const auto& c : checks) {
    failed = failed || c.failed();
    t.rows.push_back({c.name, to_string(c.status), num(c.lhs), num(c.rhs), num(c.deviation), c.note});
    t.json.push_back(Json{{"check", c.name},   {"status", to_string(c.status)}, {"lhs", c.lhs},
                          {"rhs", c.rhs},      {"deviation", c.deviation},      {"note", c.note}});
  }
  if (cfg.format == "json") t.json = Json{{"tolerance", tol}, {"checks", t.json}, {"pass", !failed}};
  emit(cfg.output, render(t, cfg.format), out);
  return failed ? kCheckFailed : kOk;
}

inline int cmd_deriv_check(const Config& cfg, std::ostream& out, std::ostream&) {
  require(cfg.order >= 0 && cfg.order <= 2, ErrorKind::InvalidArgument,
          "--order must be 0, 1 or 2, got " + std::to_string(cfg.order));
  require(cfg.radius.has_value(), ErrorKind::InvalidArgument, "deriv-check needs -R");
  const double tol = cfg.tol.value_or(5e-3);
  const auto f = load(cfg.inputs[0], cfg);
  const GroupSpace& G = f.group();
  require(G.kind() == GroupKind::Lattice, ErrorKind::InvalidArgument, "deriv-check needs a lattice input");
  const auto g = bump(BumpSpec{*cfg.radius, G.rank(), G.spacing()});
  const Pairing L = f.vdim() == 1 ? Pairing::mul() : transpose(Pairing::scalar_smul(f.vdim()));
  const auto rep = cont_diff_check(f, g, L, Measure::grid_volume(G), cfg.order, tol);

  Table t{{"order", "max_deviation", "tol", "points", "pass"}, {}, Json::array()};
  for (const auto& o : rep.orders) {
    t.rows.push_back({std::to_string(o.order), num(o.max_deviation), num(o.tol), std::to_string(o.points_checked),
                      o.pass ? "true" : "false"});
    t.json.push_back(Json{{"order", o.order}, {"max_deviation", o.max_deviation}, {"tol", o.tol},
                          {"points", o.points_checked}, {"pass", o.pass}});
  }
  if (cfg.format == "json")
    t.json = Json{{"orders", t.json}, {"margin_cells", rep.margin_cells}, {"pass", rep.pass}, {"note", rep.note}};
  emit(cfg.output, render(t, cfg.format), out);
  return rep.pass ? kOk : kCheckFailed;
}

inline int cmd_bench(const Config& cfg, std::ostream& out, std::ostream&) {
  const double tol = cfg.tol.value_or(1e-9);
  const auto rows = bench(cfg.sizes, cfg.trials);
  Table t{{"size", "naive_ms", "fast_ms", "max_deviation"}, {}, Json::array()};
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.max_deviation <= tol;
    t.rows.push_back({std::to_string(r.size), num(r.naive_ms), num(r.fast_ms), num(r.max_deviation)});
    t.json.push_back(Json{{"size", r.size}, {"naive_ms", r.naive_ms}, {"fast_ms", r.fast_ms},
                          {"max_deviation", r.max_deviation}});
  }
  emit(cfg.output, render(t, cfg.format), out);
  return ok ? kOk : kCheckFailed;
}

}  // namespace detail

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Generalized convolution on groups", "gconv"};
  app.require_subcommand(1);

  auto positive = CLI::PositiveNumber;
  const auto formats = CLI::IsMember({"csv", "json"});

  auto add_group = [&](CLI::App* sub) {
    sub->add_option("--group", cfg.group, "Z, Zn:<n>, lattice:<d>:<h> or D<n>");
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "report format")->check(formats);
  };
  auto add_algebra = [&](CLI::App* sub) {
    sub->add_option("--measure", cfg.measure, "counting or grid")->check(CLI::IsMember({"counting", "grid"}));
    sub->add_option("--pairing", cfg.pairing, "mul or smul:<m>");
    sub->add_option("--variant", cfg.variant, "std or alt")->check(CLI::IsMember({"std", "alt"}));
  };

  auto* conv = app.add_subcommand("conv", "convolve two CSV signals");
  conv->add_option("inputs", cfg.inputs, "f.csv g.csv")->required()->expected(2);
  add_group(conv);
  add_algebra(conv);
  conv->add_flag("--fast", cfg.fast, "use the transform path for scalar counting-measure cases");
  conv->add_option("-o", cfg.output, "output CSV (stdout if absent)");

  auto* moll = app.add_subcommand("mollify", "smooth a lattice signal with a normalized bump");
  moll->add_option("input", cfg.inputs, "g.csv")->required()->expected(1);
  add_group(moll);
  moll->add_option("--measure", cfg.measure, "grid")->check(CLI::IsMember({"counting", "grid"}));
  moll->add_option("-R,--radius", cfg.radius, "bump radius")->check(positive);
  moll->add_option("--study", cfg.study, "decreasing radii for a convergence report")->delimiter(',');
  moll->add_option("--x0", cfg.x0, "lattice indices of the study point")->delimiter(',');
  moll->add_option("--tol", cfg.tol, "target for the final study distance")->check(positive);
  moll->add_option("--report", cfg.report, "study report path (stdout if absent)");
  moll->add_option("-o", cfg.output, "mollified CSV (stdout if absent)");
  add_format(moll);

  auto* laws = app.add_subcommand("laws", "check the algebraic laws on the given data");
  laws->add_option("inputs", cfg.inputs, "f.csv [g.csv]")->required()->expected(1, 2);
  add_group(laws);
  add_algebra(laws);
  laws->add_option("--tol", cfg.tol, "relative tolerance (default 1e-10)")->check(positive);
  laws->add_option("--verify", cfg.verify, "claimed convolution output to check");
  laws->add_option("-o", cfg.output, "report path (stdout if absent)");
  add_format(laws);

  auto* deriv = app.add_subcommand("deriv-check", "derivative formula against finite differences");
  deriv->add_option("input", cfg.inputs, "f.csv")->required()->expected(1);
  add_group(deriv);
  deriv->add_option("-R,--radius", cfg.radius, "bump radius")->check(positive);
  deriv->add_option("--order", cfg.order, "highest derivative order (0, 1 or 2)");
  deriv->add_option("--tol", cfg.tol, "absolute tolerance (default 5e-3)")->check(positive);
  deriv->add_option("-o", cfg.output, "report path (stdout if absent)");
  add_format(deriv);

  auto* bench_cmd = app.add_subcommand("bench", "time the transform path against the direct loop");
  bench_cmd->add_option("--sizes", cfg.sizes, "signal lengths")->delimiter(',');
  bench_cmd->add_option("--trials", cfg.trials, "trials per size")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--tol", cfg.tol, "deviation tolerance (default 1e-9)")->check(positive);
  bench_cmd->add_option("-o", cfg.output, "report path (stdout if absent)");
  add_format(bench_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }

  try {
    if (conv->parsed()) return detail::cmd_conv(cfg, out, err);
    if (moll->parsed()) return detail::cmd_mollify(cfg, out, err);
    if (laws->parsed()) return detail::cmd_laws(cfg, out, err);
    if (deriv->parsed()) return detail::cmd_deriv_check(cfg, out, err);
    return detail::cmd_bench(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

}  // namespace gconv::cli
