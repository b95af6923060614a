#include "fsyn/io.hpp"

#include "fsyn/errors.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace fsyn {

using nlohmann::json;

namespace {

const char* variable_name(Variable v) { return v == Variable::Epsilon ? "epsilon" : "position"; }
const char* axis_name(Axis a) { return a == Axis::X ? "x" : "y"; }

const char* kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::RfX: return "rf_x";
    case SegmentKind::RfY: return "rf_y";
    case SegmentKind::Grad: return "grad";
  }
  return "?";
}

json design_json(const Design& d) {
  json j;
  if (const auto* one = std::get_if<FourierDesign1D>(&d)) {
    j["variable"] = variable_name(one->variable);
    j["divides_by_parameter"] = one->divides_by_parameter;
    j["terms"] = json::array();
    for (const Term1D& t : one->terms) j["terms"].push_back({{"k", t.k}, {"beta", t.beta}});
  } else {
    const auto& two = std::get<FourierDesign2D>(d);
    j["variable"] = "joint";
    j["divides_by_parameter"] = true;
    j["terms"] = json::array();
    for (const Term2D& t : two.terms) {
      j["terms"].push_back({{"k1", t.k1}, {"k2", t.k2}, {"beta", t.beta}});
    }
  }
  return j;
}

[[noreturn]] void malformed(const std::string& what) { throw MalformedInput(what); }

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    malformed(std::string("field \"") + key + "\" has the wrong type");
  }
}

double finite_number(const json& j, const char* key) {
  const json& v = j.contains(key) ? j.at(key) : json();
  if (!v.is_number()) malformed(std::string("field \"") + key + "\" must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) malformed(std::string("field \"") + key + "\" must be finite");
  return x;
}

int nonnegative_int(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    malformed(std::string("field \"") + key + "\" must be an integer");
  }
  const auto v = j.at(key).get<long long>();
  if (v < 0 || v > 1'000'000) malformed(std::string("field \"") + key + "\" is out of range");
  return static_cast<int>(v);
}

Design parse_design(const json& j) {
  if (!j.is_object()) malformed("design must be a JSON object");
  const auto variable = field<std::string>(j, "variable");
  const json& terms = j.contains("terms") ? j.at("terms") : json();
  if (!terms.is_array()) malformed("design \"terms\" must be an array");

  Design out;
  if (variable == "joint") {
    FourierDesign2D d;
    for (const json& t : terms) {
      d.terms.push_back({nonnegative_int(t, "k1"), nonnegative_int(t, "k2"), finite_number(t, "beta")});
    }
    out = d;
  } else if (variable == "epsilon" || variable == "position") {
    FourierDesign1D d;
    d.variable = variable == "epsilon" ? Variable::Epsilon : Variable::Position;
    d.divides_by_parameter = field<bool>(j, "divides_by_parameter");
    for (const json& t : terms) d.terms.push_back({nonnegative_int(t, "k"), finite_number(t, "beta")});
    out = d;
  } else {
    malformed("unknown design variable \"" + variable + "\"");
  }
  try {
    std::visit([](const auto& d) { d.validate(); }, out);
  } catch (const InvalidArgument& e) {
    malformed(e.what());
  }
  return out;
}

ProgramStage parse_stage(const json& j) {
  const auto axis = field<std::string>(j, "axis");
  if (axis != "x" && axis != "y") malformed("provenance axis must be \"x\" or \"y\"");
  return {parse_design(j), axis == "x" ? Axis::X : Axis::Y};
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
}

void append_number(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<double> parse_row(std::string_view line, std::size_t columns, std::size_t line_no) {
  std::vector<double> v;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string_view::npos) end = line.size();
    const std::string cell(line.substr(start, end - start));
    char* stop = nullptr;
    errno = 0;
    const double x = std::strtod(cell.c_str(), &stop);
    if (cell.empty() || stop != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(x)) {
      malformed("line " + std::to_string(line_no) + ": bad number \"" + cell + "\"");
    }
    v.push_back(x);
    start = end + 1;
  }
  if (v.size() != columns) {
    malformed("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " columns");
  }
  return v;
}

}  // namespace

std::string to_json(const Design& d) { return design_json(d).dump(2) + "\n"; }

std::string to_json(const PulseProgram& p) {
  json j;
  j["beta0"] = p.beta0;
  j["segments"] = json::array();
  for (const PulseSegment& s : p.segments) {
    j["segments"].push_back({{"kind", kind_name(s.kind)}, {"magnitude", s.magnitude}});
  }
  auto stage = [](const ProgramStage& st) {
    json sj = design_json(st.design);
    sj["axis"] = axis_name(st.axis);
    return sj;
  };
  if (p.provenance.empty()) {
    j["provenance"] = nullptr;
  } else if (p.provenance.size() == 1) {
    j["provenance"] = stage(p.provenance.front());
  } else {
    j["provenance"] = json::array();
    for (const ProgramStage& st : p.provenance) j["provenance"].push_back(stage(st));
  }
  return j.dump(2) + "\n";
}

Design design_from_json(std::string_view text) { return parse_design(parse_text(text)); }

PulseProgram program_from_json(std::string_view text) {
  const json j = parse_text(text);
  if (!j.is_object()) malformed("program must be a JSON object");
  PulseProgram p;
  p.beta0 = finite_number(j, "beta0");
  const json& segs = j.contains("segments") ? j.at("segments") : json();
  if (!segs.is_array()) malformed("program \"segments\" must be an array");
  for (const json& s : segs) {
    const auto kind = field<std::string>(s, "kind");
    PulseSegment seg;
    if (kind == "rf_x") {
      seg.kind = SegmentKind::RfX;
    } else if (kind == "rf_y") {
      seg.kind = SegmentKind::RfY;
    } else if (kind == "grad") {
      seg.kind = SegmentKind::Grad;
    } else {
      malformed("unknown segment kind \"" + kind + "\"");
    }
    seg.magnitude = finite_number(s, "magnitude");
    p.segments.push_back(seg);
  }
  if (j.contains("provenance")) {
    const json& prov = j.at("provenance");
    if (prov.is_array()) {
      for (const json& st : prov) p.provenance.push_back(parse_stage(st));
    } else if (prov.is_object()) {
      p.provenance.push_back(parse_stage(prov));
    } else if (!prov.is_null()) {
      malformed("program \"provenance\" must be an object, array or null");
    }
  }
  return p;
}

std::string states_csv(const SimulationResult& r) {
  std::string out = "s,eps,Mx,My,Mz\n";
  out.reserve(out.size() + r.final_states.size() * 100);
  for (std::size_t i = 0; i < r.final_states.size(); ++i) {
    const DispersionPoint p = r.mesh.point(i);
    const SpinState& m = r.final_states[i];
    for (double v : {p.s, p.eps, m.x(), m.y(), m.z()}) {
      append_number(out, v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

SimulationResult states_from_csv(std::string_view text, const SpinState& initial_state) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "s,eps,Mx,My,Mz") {
    malformed("state CSV must start with the header s,eps,Mx,My,Mz");
  }
  if (lines.size() < 2) malformed("state CSV has no rows");

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) rows.push_back(parse_row(lines[i], 5, i + 1));

  // Recover the s-major grid: s changes only after every eps value is listed.
  std::vector<double> s_values;
  std::vector<double> eps_values;
  for (const auto& r : rows) {
    if (s_values.empty() || r[0] != s_values.back()) {
      s_values.push_back(r[0]);
    }
    if (s_values.size() == 1) eps_values.push_back(r[1]);
  }
  if (rows.size() != s_values.size() * eps_values.size()) {
    malformed("state CSV rows do not form a complete s-major grid");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i][0] != s_values[i / eps_values.size()] || rows[i][1] != eps_values[i % eps_values.size()]) {
      malformed("state CSV rows do not form a complete s-major grid");
    }
  }

  try {
    EnsembleMesh mesh(s_values, eps_values);
    std::vector<SpinState> finals;
    finals.reserve(rows.size());
    for (const auto& r : rows) finals.emplace_back(Eigen::Vector3d(r[2], r[3], r[4]));
    return SimulationResult{std::move(mesh), initial_state, std::move(finals), {}};
  } catch (const InvalidArgument& e) {
    malformed(std::string("state CSV: ") + e.what());
  }
}

std::string report_csv(const ProfileErrorReport& r) {
  std::string out = "param,predicted_angle,achieved_angle,state_error,op_error\n";
  for (const PointError& pe : r.points) {
    const double param = r.parameter == Variable::Position ? pe.point.s : pe.point.eps;
    for (double v : {param, pe.predicted_angle, pe.achieved_angle, pe.state_error, pe.operator_error}) {
      append_number(out, v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

std::string series_table_csv(const std::vector<SeriesRow>& rows) {
  std::string out = "x,g,series\n";
  for (const SeriesRow& row : rows) {
    for (double v : {row.x, row.g, row.series}) {
      append_number(out, v);
      out += ',';
    }
    out.back() = '\n';
  }
  return out;
}

std::string report_summary(const ProfileErrorReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "points=%zu max_state_error=%.6e rms_state_error=%.6e max_op_error=%.6e "
                "max_prediction_error=%.6e axis_drift=%zu",
                r.points.size(), r.max_state_error, r.rms_state_error, r.max_operator_error,
                r.max_prediction_error, r.drift_count);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fsyn
