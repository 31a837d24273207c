#include "lmetk/grid_model.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lmetk/errors.hpp"

namespace lmetk {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "NaN/Inf not permitted");
  return v;
}

int get_index(const json& j, const std::string& path, int limit) {
  if (!j.is_number_integer()) fail(path, "expected an integer index");
  long long v = j.get<long long>();
  if (v < 0 || v >= limit) fail(path, "bus index out of range");
  return static_cast<int>(v);
}

// Technology defaults for emission rates, kgCO2/MW.
double fuel_emission_rate(const std::string& fuel, const std::string& path) {
  if (fuel == "coal") return 1000.0;
  if (fuel == "ng" || fuel == "gas" || fuel == "natural_gas") return 469.0;
  if (fuel == "wind") return 12.0;
  if (fuel == "solar") return 46.0;
  fail(path, "unknown fuel tag '" + fuel + "'");
}

bool connected(int n, const std::vector<Line>& lines) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  int components = n;
  for (const auto& ln : lines) {
    int a = find(ln.from), b = find(ln.to);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components <= 1;
}

}  // namespace

std::string CompactForm::row_label(int row) const {
  std::ostringstream os;
  switch (row_kind[row]) {
    case RowKind::GenUpper: os << "gen-upper"; break;
    case RowKind::GenLower: os << "gen-lower"; break;
    case RowKind::LineUpper: os << "line-upper"; break;
    case RowKind::LineLower: os << "line-lower"; break;
  }
  os << "[" << row_item[row] << "]";
  return os.str();
}

Eigen::MatrixXd compute_ptdf(const std::vector<Line>& lines, int n_buses,
                             int reference_bus) {
  const int m = static_cast<int>(lines.size());
  for (int k = 0; k < m; ++k) {
    if (!lines[k].has_reactance || lines[k].reactance <= 0.0)
      fail("lines[" + std::to_string(k) + "].reactance",
           "positive reactance required to compute the PTDF");
  }
  if (!connected(n_buses, lines))
    throw ValidationError("lines: network is disconnected");

  // Reduced susceptance system: remove the reference bus row/column and
  // solve L_rr theta = injection for each non-reference bus.
  std::vector<int> keep;
  keep.reserve(n_buses - 1);
  for (int j = 0; j < n_buses; ++j)
    if (j != reference_bus) keep.push_back(j);
  const int r = static_cast<int>(keep.size());

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n_buses, n_buses);
  for (const auto& ln : lines) {
    const double y = 1.0 / ln.reactance;
    lap(ln.from, ln.from) += y;
    lap(ln.to, ln.to) += y;
    lap(ln.from, ln.to) -= y;
    lap(ln.to, ln.from) -= y;
  }
  Eigen::MatrixXd reduced(r, r);
  for (int a = 0; a < r; ++a)
    for (int c = 0; c < r; ++c) reduced(a, c) = lap(keep[a], keep[c]);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(reduced);
  if (!lu.isInvertible())
    throw ValidationError("lines: singular reduced susceptance matrix");
  const Eigen::MatrixXd theta = lu.inverse();  // angles per unit injection

  std::vector<int> pos(n_buses, -1);  // bus -> reduced index
  for (int a = 0; a < r; ++a) pos[keep[a]] = a;

  Eigen::MatrixXd ptdf = Eigen::MatrixXd::Zero(m, n_buses);
  for (int k = 0; k < m; ++k) {
    const double y = 1.0 / lines[k].reactance;
    for (int c = 0; c < r; ++c) {
      const double tf = pos[lines[k].from] >= 0 ? theta(pos[lines[k].from], c) : 0.0;
      const double tt = pos[lines[k].to] >= 0 ? theta(pos[lines[k].to], c) : 0.0;
      ptdf(k, keep[c]) = y * (tf - tt);
    }
  }
  return ptdf;
}

CompactForm build_compact(const NetworkCase& net) {
  const int g = net.n_gens(), m = net.n_lines(), n = net.n_buses;
  const int p = 2 * g + 2 * m;
  CompactForm cf;
  cf.A = Eigen::MatrixXd::Zero(p, g);
  cf.b = Eigen::VectorXd::Zero(p);
  cf.F = Eigen::MatrixXd::Zero(p, n);
  cf.row_kind.resize(p);
  cf.row_item.resize(p);

  // Line flow = P (B x - l), so the flow rows carry A = P B and F = +-P.
  const Eigen::MatrixXd pb = net.ptdf * net.gen_map;

  for (int i = 0; i < g; ++i) {  // x_i <= cap_i
    cf.A(i, i) = 1.0;
    cf.b(i) = net.generators[i].capacity;
    cf.row_kind[i] = RowKind::GenUpper;
    cf.row_item[i] = i;
  }
  for (int i = 0; i < g; ++i) {  // -x_i <= 0
    cf.A(g + i, i) = -1.0;
    cf.row_kind[g + i] = RowKind::GenLower;
    cf.row_item[g + i] = i;
  }
  for (int k = 0; k < m; ++k) {  // P B x <= f_up + P l
    cf.A.row(2 * g + k) = pb.row(k);
    cf.b(2 * g + k) = net.lines[k].flow_upper;
    cf.F.row(2 * g + k) = net.ptdf.row(k);
    cf.row_kind[2 * g + k] = RowKind::LineUpper;
    cf.row_item[2 * g + k] = k;
  }
  for (int k = 0; k < m; ++k) {  // -P B x <= -f_lo - P l
    cf.A.row(2 * g + m + k) = -pb.row(k);
    cf.b(2 * g + m + k) = -net.lines[k].flow_lower;
    cf.F.row(2 * g + m + k) = -net.ptdf.row(k);
    cf.row_kind[2 * g + m + k] = RowKind::LineLower;
    cf.row_item[2 * g + m + k] = k;
  }
  return cf;
}

NetworkCase parse_case(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("case: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("case", "expected a JSON object");

  NetworkCase net;
  if (!doc.contains("buses")) fail("buses", "missing");
  if (!doc["buses"].is_number_integer() || doc["buses"].get<long long>() < 1)
    fail("buses", "expected a positive bus count");
  net.n_buses = doc["buses"].get<int>();

  if (!doc.contains("reference_bus")) fail("reference_bus", "missing");
  net.reference_bus = get_index(doc["reference_bus"], "reference_bus", net.n_buses);

  if (!doc.contains("generators") || !doc["generators"].is_array() ||
      doc["generators"].empty())
    fail("generators", "expected a nonempty array");
  int gi = 0;
  for (const auto& jg : doc["generators"]) {
    const std::string path = "generators[" + std::to_string(gi) + "]";
    if (!jg.is_object()) fail(path, "expected an object");
    Generator gen;
    if (!jg.contains("bus")) fail(path + ".bus", "missing");
    gen.bus = get_index(jg["bus"], path + ".bus", net.n_buses);
    if (!jg.contains("cost")) fail(path + ".cost", "missing");
    gen.cost = get_number(jg["cost"], path + ".cost");
    if (!jg.contains("capacity")) fail(path + ".capacity", "missing");
    gen.capacity = get_number(jg["capacity"], path + ".capacity");
    if (gen.capacity <= 0.0) fail(path + ".capacity", "must be positive");
    if (jg.contains("fuel")) {
      if (!jg["fuel"].is_string()) fail(path + ".fuel", "expected a string");
      gen.fuel = jg["fuel"].get<std::string>();
    }
    if (jg.contains("emission_rate")) {
      gen.emission_rate = get_number(jg["emission_rate"], path + ".emission_rate");
    } else if (!gen.fuel.empty()) {
      gen.emission_rate = fuel_emission_rate(gen.fuel, path + ".fuel");
    } else {
      fail(path + ".emission_rate", "missing (no fuel tag to default from)");
    }
    if (gen.emission_rate < 0.0) fail(path + ".emission_rate", "must be >= 0");
    net.generators.push_back(gen);
    ++gi;
  }

  if (!doc.contains("lines") || !doc["lines"].is_array())
    fail("lines", "expected an array");
  int li = 0;
  for (const auto& jl : doc["lines"]) {
    const std::string path = "lines[" + std::to_string(li) + "]";
    if (!jl.is_object()) fail(path, "expected an object");
    Line ln;
    if (!jl.contains("from")) fail(path + ".from", "missing");
    ln.from = get_index(jl["from"], path + ".from", net.n_buses);
    if (!jl.contains("to")) fail(path + ".to", "missing");
    ln.to = get_index(jl["to"], path + ".to", net.n_buses);
    if (ln.from == ln.to) fail(path, "self-loop line");
    if (jl.contains("reactance")) {
      ln.reactance = get_number(jl["reactance"], path + ".reactance");
      if (ln.reactance <= 0.0) fail(path + ".reactance", "must be positive");
      ln.has_reactance = true;
    }
    if (!jl.contains("limit")) fail(path + ".limit", "missing");
    ln.flow_upper = get_number(jl["limit"], path + ".limit");
    if (ln.flow_upper <= 0.0) fail(path + ".limit", "must be positive");
    ln.flow_lower = jl.contains("lower_limit")
                        ? get_number(jl["lower_limit"], path + ".lower_limit")
                        : -ln.flow_upper;
    if (ln.flow_lower > 0.0) fail(path + ".lower_limit", "must be <= 0");
    net.lines.push_back(ln);
    ++li;
  }
  const int m = net.n_lines();
  if (m > 0 && !connected(net.n_buses, net.lines))
    fail("lines", "network is disconnected");
  if (m == 0 && net.n_buses > 1) fail("lines", "network is disconnected");

  bool have_reactances = !net.lines.empty();
  for (const auto& ln : net.lines) have_reactances &= ln.has_reactance;

  if (doc.contains("ptdf")) {
    const auto& jp = doc["ptdf"];
    if (!jp.is_array() || static_cast<int>(jp.size()) != m)
      fail("ptdf", "expected " + std::to_string(m) + " rows");
    net.ptdf = Eigen::MatrixXd::Zero(m, net.n_buses);
    for (int k = 0; k < m; ++k) {
      const auto& row = jp[k];
      const std::string path = "ptdf[" + std::to_string(k) + "]";
      if (!row.is_array() || static_cast<int>(row.size()) != net.n_buses)
        fail(path, "expected " + std::to_string(net.n_buses) + " columns");
      for (int j = 0; j < net.n_buses; ++j)
        net.ptdf(k, j) = get_number(row[j], path + "[" + std::to_string(j) + "]");
    }
    for (int k = 0; k < m; ++k)
      if (std::abs(net.ptdf(k, net.reference_bus)) > 1e-12)
        fail("ptdf[" + std::to_string(k) + "]",
             "reference-bus column must be zero");
    if (have_reactances) {
      const Eigen::MatrixXd computed =
          compute_ptdf(net.lines, net.n_buses, net.reference_bus);
      if ((computed - net.ptdf).cwiseAbs().maxCoeff() > 1e-6)
        fail("ptdf", "disagrees with the reactance-derived PTDF (> 1e-6)");
    }
  } else if (have_reactances) {
    net.ptdf = compute_ptdf(net.lines, net.n_buses, net.reference_bus);
  } else if (m > 0) {
    fail("lines", "either a ptdf matrix or per-line reactances are required");
  } else {
    net.ptdf = Eigen::MatrixXd::Zero(0, net.n_buses);
  }

  net.gen_map = Eigen::MatrixXd::Zero(net.n_buses, net.n_gens());
  for (int i = 0; i < net.n_gens(); ++i)
    net.gen_map(net.generators[i].bus, i) = 1.0;

  net.nominal_load = Eigen::VectorXd::Zero(net.n_buses);
  if (doc.contains("nominal_load")) {
    const auto& jn = doc["nominal_load"];
    if (!jn.is_array() || static_cast<int>(jn.size()) != net.n_buses)
      fail("nominal_load", "expected " + std::to_string(net.n_buses) + " entries");
    for (int j = 0; j < net.n_buses; ++j) {
      net.nominal_load(j) =
          get_number(jn[j], "nominal_load[" + std::to_string(j) + "]");
      if (net.nominal_load(j) < 0.0)
        fail("nominal_load[" + std::to_string(j) + "]", "must be >= 0");
    }
  }
  if (doc.contains("omega")) {
    net.omega = get_number(doc["omega"], "omega");
    if (net.omega < 0.0 || net.omega >= 1.0)
      fail("omega", "must lie in [0, 1)");
  }
  return net;
}

NetworkCase parse_case_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("case: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str());
}

LoadPolytope case_polytope(const NetworkCase& net) {
  LoadPolytope poly;
  poly.nominal = net.nominal_load;
  poly.omega = net.omega;
  return poly;
}

}  // namespace lmetk
