#include "cli.hpp"

#include "fsyn/analysis.hpp"
#include "fsyn/compiler.hpp"
#include "fsyn/errors.hpp"
#include "fsyn/fourier.hpp"
#include "fsyn/io.hpp"
#include "fsyn/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <regex>

namespace fsyn::cli {

namespace {

constexpr double kPi = std::numbers::pi;
namespace fs = std::filesystem;
using nlohmann::json;

double parse_number(const std::string& text) {
  char* stop = nullptr;
  const double v = std::strtod(text.c_str(), &stop);
  if (text.empty() || stop != text.c_str() + text.size() || !std::isfinite(v)) {
    throw InvalidArgument("not a finite number: \"" + text + "\"");
  }
  return v;
}

int parse_int(const std::string& text) {
  const double v = parse_number(text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument("not an integer: \"" + text + "\"");
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    parts.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return parts;
}

unsigned thread_count() {
  const char* env = std::getenv("FSYN_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  const int n = parse_int(env);
  if (n < 0) throw InvalidArgument("FSYN_THREADS must be non-negative");
  return static_cast<unsigned>(n);
}

Axis parse_axis(const std::string& text) {
  if (text == "x") return Axis::X;
  if (text == "y") return Axis::Y;
  throw InvalidArgument("axis must be x or y, got \"" + text + "\"");
}

const char* axis_name(Axis a) { return a == Axis::X ? "x" : "y"; }

SpinState parse_state(const std::string& text) {
  static const std::vector<std::pair<std::string, Eigen::Vector3d>> named = {
      {"x", {1, 0, 0}}, {"y", {0, 1, 0}}, {"z", {0, 0, 1}},
      {"-x", {-1, 0, 0}}, {"-y", {0, -1, 0}}, {"-z", {0, 0, -1}}};
  for (const auto& [name, v] : named) {
    if (text == name) return SpinState(v);
  }
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw InvalidArgument("initial state must be x, y, z, -x, -y, -z or \"a,b,c\"");
  return SpinState::normalized({parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2])});
}

Variable parse_variable(const std::string& text) {
  if (text == "epsilon") return Variable::Epsilon;
  if (text == "position") return Variable::Position;
  throw InvalidArgument("variable must be epsilon or position, got \"" + text + "\"");
}

struct TargetArgs {
  std::string spec;
  double delta = 0.9;
  std::string variable = "epsilon";
};

// Grammar:
//   uniform:ANGLE                 eps target, constant angle over [1 - delta, 1]
//   constant:ANGLE                position target, constant angle over [0, 1]
//   slice:LO,HI,ANGLE[,RAMP]      position slice
//   table:FILE                    CSV rows "x,angle" for --variable
//   series                        (evaluate only) the design's own prediction
std::optional<TargetProfile1D> parse_target(const TargetArgs& a) {
  const std::string& spec = a.spec;
  if (spec == "series") return std::nullopt;
  const std::size_t colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidArgument("target spec needs KIND:ARGS, got \"" + spec + "\"");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "uniform") return TargetProfile1D::uniform_epsilon(parse_angle(rest), a.delta);
  if (kind == "constant") {
    const double angle = parse_angle(rest);
    return TargetProfile1D::position([angle](double) { return angle; });
  }
  if (kind == "slice") {
    const auto p = split(rest, ',');
    if (p.size() != 3 && p.size() != 4) throw InvalidArgument("slice target needs LO,HI,ANGLE[,RAMP]");
    return slice_target(parse_number(p[0]), parse_number(p[1]), parse_angle(p[2]),
                        p.size() == 4 ? parse_number(p[3]) : 0.0);
  }
  if (kind == "table") {
    const std::string text = read_text_file(rest);
    std::vector<double> xs;
    std::vector<double> angles;
    for (const std::string& line : split(text, '\n')) {
      if (line.empty() || line == "\r") continue;
      const auto cells = split(line, ',');
      if (cells.size() != 2) throw MalformedInput("table rows must be \"x,angle\"");
      try {
        xs.push_back(parse_number(cells[0]));
        angles.push_back(parse_number(cells[1]));
      } catch (const InvalidArgument& e) {
        throw MalformedInput(std::string("table: ") + e.what());
      }
    }
    return TargetProfile1D::tabulated(parse_variable(a.variable), xs, angles);
  }
  throw InvalidArgument("unknown target kind \"" + kind + "\"");
}

void add_target_options(CLI::App* cmd, TargetArgs& t, bool allow_series) {
  std::string help = "uniform:ANGLE | constant:ANGLE | slice:LO,HI,ANGLE[,RAMP] | table:FILE";
  if (allow_series) help += " | series";
  cmd->add_option("--target", t.spec, help)->required();
  cmd->add_option("--delta", t.delta, "inhomogeneity width for uniform targets")->capture_default_str();
  cmd->add_option("--variable", t.variable, "dispersion variable of table targets")
      ->check(CLI::IsMember({"epsilon", "position"}))
      ->capture_default_str();
}

void write_file(const fs::path& path, std::string_view content) {
  try {
    write_text_file_atomic(path, content);
  } catch (const std::exception& e) {
    throw InvalidArgument(std::string("cannot write output: ") + e.what());
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// design ---------------------------------------------------------------------

struct DesignArgs {
  TargetArgs target;
  int terms = 0;
  double quad_spacing = QuadratureOptions{}.fine_spacing;
  std::string out;
};

int cmd_design(const DesignArgs& a, std::ostream& out) {
  const auto target = parse_target(a.target);
  if (!target) throw InvalidArgument("design needs a concrete target");
  QuadratureOptions opts;
  opts.fine_spacing = a.quad_spacing;
  const FourierDesign1D d = design_1d(*target, a.terms, opts);
  const TruncationReport tr = truncation_error(d, *target, 1001);
  write_file(a.out, to_json(Design{d}));
  out << "terms=" << d.terms.size() << fmt(" max_abs=%.6e", tr.max_abs) << fmt(" rms=%.6e", tr.rms)
      << fmt(" max_abs_angle=%.6e", tr.max_abs_angle) << "\n";
  return kOk;
}

// compile --------------------------------------------------------------------

struct CompileArgs {
  std::string design;
  std::string axis = "y";
  std::string beta0 = "30deg";
  bool peephole = false;
  std::string out;
};

int cmd_compile(const CompileArgs& a, std::ostream& out) {
  const Axis axis = parse_axis(a.axis);
  const double beta0 = parse_angle(a.beta0);
  const Design d = design_from_json(read_text_file(a.design));
  PulseProgram p = compile(d, axis, beta0);
  if (a.peephole) p = peephole_cancel(p);
  write_file(a.out, to_json(p));
  out << "segments=" << p.segments.size() << fmt(" duration=%.17g", program_duration(p, 1.0, 1.0)) << "\n";
  return kOk;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
  std::string program;
  bool naive = false;
  std::string s = "0";
  std::string eps = "1";
  std::string m0 = "z";
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const EnsembleMesh mesh(parse_mesh(a.s), parse_mesh(a.eps));
  const SpinState m0 = parse_state(a.m0);
  std::optional<SimulationResult> result;
  if (a.naive) {
    if (m0.vector() != SpinState::ez().vector()) throw InvalidArgument("the naive pulse starts from z");
    const std::vector<SpinState> per_eps = naive_pulse(mesh.eps_values());
    std::vector<SpinState> finals;
    finals.reserve(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) finals.push_back(per_eps[i % per_eps.size()]);
    result = SimulationResult{mesh, m0, std::move(finals), {}};
  } else {
    if (a.program.empty()) throw InvalidArgument("simulate needs --program or --naive");
    const PulseProgram p = program_from_json(read_text_file(a.program));
    result = simulate_ensemble(p, mesh, m0, thread_count());
  }
  write_file(a.out, states_csv(*result));
  out << "points=" << mesh.size() << "\n";
  return kOk;
}

// evaluate -------------------------------------------------------------------

struct EvaluateArgs {
  std::string states;
  std::string design;
  std::string program;
  TargetArgs target;
  std::string axis = "y";
  std::string m0 = "z";
  std::vector<double> exclude;
  double band_halfwidth = 0.05;
  std::string metric = "state";
  std::optional<double> max_error;
  std::string out;
};

double metric_value(const ProfileErrorReport& r, const std::string& metric) {
  if (metric == "state") return r.max_state_error;
  if (metric == "operator") return r.max_operator_error;
  if (metric == "prediction") return r.max_prediction_error;
  return r.max_target_residual;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const Axis axis = parse_axis(a.axis);
  const SpinState m0 = parse_state(a.m0);
  const auto target = parse_target(a.target);
  const Design design = design_from_json(read_text_file(a.design));
  SimulationResult result = states_from_csv(read_text_file(a.states), m0);

  if (!a.program.empty()) {
    const PulseProgram p = program_from_json(read_text_file(a.program));
    SimulationResult full = simulate_ensemble(p, result.mesh, m0, thread_count());
    for (std::size_t i = 0; i < full.final_states.size(); ++i) {
      if ((full.final_states[i].vector() - result.final_states[i].vector()).lpNorm<Eigen::Infinity>() > 1e-12) {
        throw MalformedInput("states file was not produced by the given program");
      }
    }
    result = std::move(full);
  }

  AngleField field;
  if (target) {
    if (const auto* one = std::get_if<FourierDesign1D>(&design); one && one->variable != target->variable) {
      throw InvalidArgument("target and design use different dispersion variables");
    }
    field = target_angle(*target);
  } else {
    field = series_prediction(design);
  }
  PointFilter active;
  if (!a.exclude.empty()) {
    active = [centers = a.exclude, w = a.band_halfwidth](const DispersionPoint& p) {
      return std::none_of(centers.begin(), centers.end(), [&](double c) { return std::abs(p.s - c) <= w; });
    };
  }

  const ProfileErrorReport report = profile_error(result, design, axis, field, active);
  if (!a.out.empty()) write_file(a.out, report_csv(report));
  out << report_summary(report) << "\n";

  if (a.max_error && metric_value(report, a.metric) > *a.max_error) {
    err << "fsyn: max " << a.metric << " error " << fmt("%.6e", metric_value(report, a.metric))
        << " exceeds bound " << fmt("%.6e", *a.max_error) << "\n";
    return kThresholdExceeded;
  }
  return kOk;
}

// reproduce ------------------------------------------------------------------

struct ReproduceArgs {
  std::string figure;
  std::string out_dir;
};

json mesh_json(const std::vector<double>& v) {
  return {{"lo", v.front()}, {"hi", v.back()}, {"n", v.size()}};
}

json report_json(const ProfileErrorReport& r) {
  return {{"max_state_error", r.max_state_error},
          {"rms_state_error", r.rms_state_error},
          {"max_operator_error", r.max_operator_error},
          {"rms_operator_error", r.rms_operator_error},
          {"max_prediction_error", r.max_prediction_error},
          {"max_target_residual", r.max_target_residual},
          {"axis_drift_count", r.drift_count}};
}

int cmd_reproduce(const ReproduceArgs& a, std::ostream& out) {
  const auto fig = parse_figure(a.figure);
  if (!fig) throw InvalidArgument("unknown figure \"" + a.figure + "\" (expected fig2 .. fig6)");
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create " + dir.string() + ": " + ec.message());

  const FigureRun run = figure_dataset(*fig, thread_count());
  const FigureSpec& spec = run.spec;
  const std::string stem = spec.name + "_";

  const Eigen::Vector3d m0 = spec.initial_state.vector();
  json meta = {{"figure", spec.name},
               {"term_count", spec.term_count},
               {"beta0", spec.beta0},
               {"axis", axis_name(spec.axis)},
               {"initial_state", {m0.x(), m0.y(), m0.z()}}};

  if (run.design) write_file(dir / (stem + "design.json"), to_json(Design{*run.design}));
  if (run.program) {
    write_file(dir / (stem + "program.json"), to_json(*run.program));
    meta["segments"] = run.program->segments.size();
  }
  if (run.result) {
    write_file(dir / (stem + "states.csv"), states_csv(*run.result));
    meta["mesh"] = {{"s", mesh_json(spec.s_values)}, {"eps", mesh_json(spec.eps_values)}};
  }
  if (run.report) {
    write_file(dir / (stem + "report.csv"), report_csv(*run.report));
    meta["report"] = report_json(*run.report);
  }
  if (!spec.band_centers.empty()) {
    meta["excluded_bands"] = {{"centers", spec.band_centers}, {"halfwidth", spec.band_halfwidth}};
  }
  if (run.truncation) {
    meta["truncation"] = {{"max_abs", run.truncation->max_abs},
                          {"rms", run.truncation->rms},
                          {"max_abs_angle", run.truncation->max_abs_angle}};
  }
  if (!run.series_table.empty()) {
    write_file(dir / (stem + "series.csv"), series_table_csv(run.series_table));
    meta["series_grid"] = mesh_json(spec.series_grid);
  }
  write_file(dir / (stem + "meta.json"), meta.dump(2) + "\n");

  out << spec.name;
  if (run.report) out << " " << report_summary(*run.report);
  out << "\n";
  return kOk;
}

}  // namespace

double parse_angle(const std::string& raw) {
  std::string text = raw;
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }),
             text.end());
  if (text.size() > 3 && text.ends_with("deg")) {
    return parse_number(text.substr(0, text.size() - 3)) * kPi / 180.0;
  }
  static const std::regex pi_form(R"(^([+-]?[0-9]*\.?[0-9]*)pi(/([0-9]*\.?[0-9]+))?$)");
  std::smatch m;
  if (std::regex_match(text, m, pi_form)) {
    const std::string c = m[1].str();
    const double coeff = c.empty() || c == "+" ? 1.0 : c == "-" ? -1.0 : parse_number(c);
    const double denom = m[3].matched ? parse_number(m[3].str()) : 1.0;
    if (denom == 0.0) throw InvalidArgument("angle \"" + raw + "\" divides by zero");
    return coeff * kPi / denom;
  }
  return parse_number(text);
}

std::vector<double> parse_mesh(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    const auto p = split(text, ':');
    if (p.size() != 3) throw InvalidArgument("mesh range must be lo:hi:n, got \"" + text + "\"");
    const int n = parse_int(p[2]);
    if (n < 1) throw InvalidArgument("mesh range needs n >= 1");
    return EnsembleMesh::uniform(parse_number(p[0]), parse_number(p[1]), n);
  }
  std::vector<double> v;
  for (const std::string& cell : split(text, ',')) v.push_back(parse_number(cell));
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fourier-synthesis compensating pulse design for the Bloch equations", "fsyn"};
  app.require_subcommand(1);

  DesignArgs da;
  auto* design = app.add_subcommand("design", "Fit a truncated cosine series to a target profile");
  add_target_options(design, da.target, false);
  design->add_option("--terms", da.terms, "number of series terms K")->required()->check(CLI::PositiveNumber);
  design->add_option("--quad-spacing", da.quad_spacing, "fine quadrature node spacing on [0, 1]");
  design->add_option("--out", da.out, "design JSON to write")->required();

  CompileArgs ca;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a design into a pulse program");
  compile_cmd->add_option("--design", ca.design, "design JSON")->required();
  compile_cmd->add_option("--axis", ca.axis, "rotation axis (x or y)")->capture_default_str();
  compile_cmd->add_option("--beta0", ca.beta0, "largest flip per element (radians, or NNdeg)")
      ->capture_default_str();
  compile_cmd->add_flag("--peephole", ca.peephole, "merge adjacent same-kind segments");
  compile_cmd->add_option("--out", ca.out, "program JSON to write")->required();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Propagate a program over a dispersion mesh");
  simulate->add_option("--program", sa.program, "program JSON");
  simulate->add_flag("--naive", sa.naive, "use the uncompensated pi/2 pulse instead of a program");
  simulate->add_option("--s", sa.s, "position mesh: lo:hi:n, a value, or a list")->capture_default_str();
  simulate->add_option("--eps", sa.eps, "rf-scale mesh: lo:hi:n, a value, or a list")->capture_default_str();
  simulate->add_option("--m0", sa.m0, "initial state: x, y, z, -x, -y, -z or a,b,c")->capture_default_str();
  simulate->add_option("--out", sa.out, "state CSV to write")->required();

  EvaluateArgs ea;
  std::string exclude;
  double max_error = 0.0;
  auto* evaluate = app.add_subcommand("evaluate", "Compare simulated states with a target profile");
  evaluate->add_option("--states", ea.states, "state CSV")->required();
  evaluate->add_option("--design", ea.design, "design JSON")->required();
  evaluate->add_option("--program", ea.program, "program JSON; enables propagator-based angles");
  add_target_options(evaluate, ea.target, true);
  evaluate->add_option("--axis", ea.axis, "design rotation axis (x or y)")->capture_default_str();
  evaluate->add_option("--m0", ea.m0, "initial state used for the simulation")->capture_default_str();
  evaluate->add_option("--exclude", exclude, "comma-separated s band centers left out of the aggregates");
  evaluate->add_option("--band-halfwidth", ea.band_halfwidth, "half width of excluded bands")
      ->capture_default_str();
  evaluate->add_option("--metric", ea.metric, "aggregate compared with --max-error")
      ->check(CLI::IsMember({"state", "operator", "prediction", "target"}))
      ->capture_default_str();
  auto* max_opt = evaluate->add_option("--max-error", max_error, "exit 5 when the metric exceeds this");
  evaluate->add_option("--out", ea.out, "report CSV to write");

  ReproduceArgs ra;
  auto* reproduce = app.add_subcommand("reproduce", "Run a figure pipeline with its fixed parameters");
  reproduce->add_option("--figure", ra.figure, "fig2 .. fig6")->required();
  reproduce->add_option("--out-dir", ra.out_dir, "directory for dataset files")->required();

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    if (design->parsed()) return cmd_design(da, out);
    if (compile_cmd->parsed()) return cmd_compile(ca, out);
    if (simulate->parsed()) return cmd_simulate(sa, out);
    if (evaluate->parsed()) {
      if (!exclude.empty()) {
        for (const std::string& c : split(exclude, ',')) ea.exclude.push_back(parse_number(c));
      }
      if (max_opt->count() > 0) ea.max_error = max_error;
      return cmd_evaluate(ea, out, err);
    }
    return cmd_reproduce(ra, out);
  } catch (const NumericalToleranceError& e) {
    err << "fsyn: numerical tolerance not met: " << e.what() << fmt(" (residual %.3e)", e.residual()) << "\n";
    return kNumericFailure;
  } catch (const MalformedInput& e) {
    err << "fsyn: bad input file: " << e.what() << "\n";
    return kBadInputFile;
  } catch (const std::invalid_argument& e) {
    err << "fsyn: " << e.what() << "\n";
    return kBadArguments;
  } catch (const std::exception& e) {
    err << "fsyn: " << e.what() << "\n";
    return kNumericFailure;
  }
}

}  // namespace fsyn::cli
