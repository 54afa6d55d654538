#include "zite/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <CLI11.hpp>
#include <json.hpp>

#include "zite/coefficients.hpp"
#include "zite/errors.hpp"
#include "zite/galerkin.hpp"
#include "zite/specfun.hpp"

namespace zite::cli {

namespace {

namespace pt = boost::property_tree;

const char* task_name(Task t) {
  switch (t) {
    case Task::Compute: return "compute";
    case Task::Reference: return "reference";
    case Task::Estimate: return "estimate";
    case Task::Convergence: return "convergence";
  }
  return "?";
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain", {"kind", "quadrature_order", "volume_order", "angular_order", "boundary_order",
                  "split_at_jumps"}},
      {"basis", {"ordering", "p_max", "q_max", "size", "include_sine"}},
      {"coefficients", {"n", "eta"}},
      {"task", {"count", "mu_tolerance", "k_lo", "k_hi", "scan_step", "m_max",
                "compare_with_galerkin", "regime", "method", "poly_degree", "poly_samples", "n_lo",
                "n_hi", "k1", "sizes", "reference"}},
      {"output", {"format", "path", "grid"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  if (used != value.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + value + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  if (used != value.size() || v < -1000000 || v > 1000000) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

CoefficientSpec parse_coefficient(const std::string& key, const std::string& value) {
  const auto parts = split_list(value);
  if (parts.empty()) throw ConfigError(key + ": empty coefficient specification");
  CoefficientSpec spec{parts.front(), {}};
  for (std::size_t i = 1; i < parts.size(); ++i) spec.params.push_back(parse_double(key, parts[i]));
  return spec;
}

// Flat view of the INI file with strict key checking.
class Settings {
 public:
  explicit Settings(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
      const auto it = allowed_keys().find(section);
      if (it == allowed_keys().end()) throw ConfigError("config: unknown section [" + section + "]");
      if (!body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
      for (const auto& [key, node] : body) {
        if (!it->second.count(key)) throw ConfigError("config: unknown key " + section + "." + key);
        values_[section + "." + key] = trim(node.data());
      }
    }
  }

  [[nodiscard]] std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  template <typename T, typename Parse>
  void read(const std::string& key, T& target, Parse parse) const {
    if (auto v = get(key)) target = parse(key, *v);
  }

 private:
  std::map<std::string, std::string> values_;
};

RefractiveIndex make_n(const CoefficientSpec& spec) {
  return RefractiveIndex::from_tag(spec.tag, spec.params);
}

Conductivity make_eta(const CoefficientSpec& spec) { return Conductivity::from_tag(spec.tag, spec.params); }

std::string spec_text(const CoefficientSpec& spec) {
  std::string s = spec.tag;
  for (double p : spec.params) s += " " + format_number(p);
  return s;
}

void require_coefficients(const RunConfig& c) {
  if (!c.n || !c.eta) throw ConfigError("[coefficients] n and eta are required for this task");
}

CoefficientPair coefficients(const RunConfig& c) {
  require_coefficients(c);
  CoefficientPair pair{make_n(*c.n), make_eta(*c.eta)};
  pair.validate(c.domain.kind);
  return pair;
}

BasisSet make_basis(const RunConfig& c) {
  if (c.ordering == BasisOrdering::ByLambda) {
    return first_by_lambda(c.domain, c.basis_size, c.include_sine);
  }
  if (c.domain.kind == DomainKind::UnitDisk) {
    return build_disk_basis(c.domain, c.p_max, c.q_max, c.include_sine);
  }
  return build_square_basis(c.domain, c.p_max, c.q_max);
}

std::string hex_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string orders_text(const Domain& d) {
  if (d.kind == DomainKind::UnitSquare) {
    return "volume " + std::to_string(d.volume_order) + ", boundary " + std::to_string(d.boundary_order);
  }
  return "radial " + std::to_string(d.volume_order) + ", angular " + std::to_string(d.angular_order) +
         ", boundary " + std::to_string(d.boundary_order) +
         (d.split_at_jumps ? ", split at jumps" : "");
}

Table base_table(const RunConfig& c, const std::string& title) {
  Table t;
  t.title = title;
  t.meta.emplace_back("config_hash", hex_hash(c.hash));
  t.meta.emplace_back("domain", to_string(c.domain.kind));
  if (c.n) t.meta.emplace_back("n", spec_text(*c.n));
  if (c.eta) t.meta.emplace_back("eta", spec_text(*c.eta));
  return t;
}

void add_basis_meta(Table& t, const Domain& d, std::size_t size) {
  t.meta.emplace_back("basis_size", std::to_string(size));
  t.meta.emplace_back("quadrature", orders_text(d));
}

DispersionQuery dispersion_query(const RunConfig& c) {
  if (c.domain.kind != DomainKind::UnitDisk) {
    throw ConfigError("reference: exact eigenvalues are only available on the disk");
  }
  require_coefficients(c);
  const auto n = make_n(*c.n);
  const auto eta = make_eta(*c.eta);
  if (!n.is_constant() || !eta.is_constant()) {
    throw ConfigError("reference: n and eta must both be constant");
  }
  DispersionQuery q = c.window;
  q.n = n.params().at(0);
  q.eta = eta.params().at(0);
  try {
    q.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("reference: ") + e.what());
  }
  return q;
}

Table grid_table(const RunConfig& c, const Spectrum& spectrum, std::size_t index) {
  const int res = c.grid;
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(res) * res);
  if (c.domain.kind == DomainKind::UnitDisk) {
    for (int i = 0; i < res; ++i) {
      const double r = static_cast<double>(i) / (res - 1);
      for (int j = 0; j < res; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / res;
        points.push_back({r * std::cos(theta), r * std::sin(theta)});
      }
    }
  } else {
    for (int i = 0; i < res; ++i) {
      for (int j = 0; j < res; ++j) {
        points.push_back({static_cast<double>(i) / (res - 1), static_cast<double>(j) / (res - 1)});
      }
    }
  }
  const auto values = eval_eigenfunction(spectrum, index, points);
  Table t = base_table(c, "eigenfunction");
  t.meta.emplace_back("eigen_index", std::to_string(index + 1));
  t.meta.emplace_back("k_value", format_number(spectrum.pairs[index].k));
  t.meta.emplace_back("grid", std::to_string(res));
  t.columns = {"x1", "x2", "value"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    t.rows.push_back({points[i].x1, points[i].x2, values[i]});
  }
  return t;
}

std::string cell_text(const Cell& cell) {
  if (std::holds_alternative<long>(cell)) return std::to_string(std::get<long>(cell));
  if (std::holds_alternative<double>(cell)) return format_number(std::get<double>(cell));
  if (std::holds_alternative<std::string>(cell)) return std::get<std::string>(cell);
  return {};
}

nlohmann::ordered_json cell_json(const Cell& cell) {
  if (std::holds_alternative<long>(cell)) return std::get<long>(cell);
  if (std::holds_alternative<double>(cell)) {
    const double v = std::get<double>(cell);
    if (!std::isfinite(v)) return format_number(v);
    return std::stod(format_number(v));
  }
  if (std::holds_alternative<std::string>(cell)) return std::get<std::string>(cell);
  return nullptr;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(const std::string& text, Task task) {
  const Settings s(text);
  RunConfig c;
  c.task = task;
  c.hash = fnv1a(std::string(task_name(task)) + "\n" + text);

  if (auto kind = s.get("domain.kind")) {
    if (*kind == "disk") {
      c.domain = Domain::unit_disk();
    } else if (*kind == "square") {
      c.domain = Domain::unit_square();
    } else {
      throw ConfigError("domain.kind: expected disk or square, got '" + *kind + "'");
    }
  }
  if (auto q = s.get("domain.quadrature_order")) {
    const int order = parse_int("domain.quadrature_order", *q);
    c.domain.volume_order = c.domain.angular_order = c.domain.boundary_order = order;
  }
  s.read("domain.volume_order", c.domain.volume_order, parse_int);
  s.read("domain.angular_order", c.domain.angular_order, parse_int);
  s.read("domain.boundary_order", c.domain.boundary_order, parse_int);
  s.read("domain.split_at_jumps", c.domain.split_at_jumps, parse_bool);
  try {
    c.domain.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  const bool gauss_boundary = c.domain.kind == DomainKind::UnitSquare;
  if (c.domain.volume_order > kMaxGaussLegendreOrder ||
      (gauss_boundary && c.domain.boundary_order > kMaxGaussLegendreOrder) ||
      c.domain.angular_order > 4096 || c.domain.boundary_order > 4096) {
    throw ConfigError("domain: quadrature order too large");
  }

  if (auto o = s.get("basis.ordering")) {
    if (*o == "paper_grid") {
      c.ordering = BasisOrdering::PaperGrid;
    } else if (*o == "by_lambda") {
      c.ordering = BasisOrdering::ByLambda;
    } else {
      throw ConfigError("basis.ordering: expected paper_grid or by_lambda, got '" + *o + "'");
    }
  }
  if (c.domain.kind == DomainKind::UnitSquare) c.q_max = 5;
  s.read("basis.p_max", c.p_max, parse_int);
  s.read("basis.q_max", c.q_max, parse_int);
  s.read("basis.size", c.basis_size, parse_int);
  s.read("basis.include_sine", c.include_sine, parse_bool);
  const int p_min = c.domain.kind == DomainKind::UnitDisk ? 0 : 1;
  if (c.p_max < p_min || c.q_max < 1) throw ConfigError("basis: p_max/q_max out of range");
  if (c.basis_size < 1) throw ConfigError("basis.size must be >= 1");
  if (c.include_sine && c.domain.kind == DomainKind::UnitSquare) {
    throw ConfigError("basis.include_sine applies to the disk only");
  }

  if (auto v = s.get("coefficients.n")) c.n = parse_coefficient("coefficients.n", *v);
  if (auto v = s.get("coefficients.eta")) c.eta = parse_coefficient("coefficients.eta", *v);
  try {
    if (c.n) {
      const auto n = make_n(*c.n);
      if (!n.valid_on(c.domain.kind)) throw ConfigError("coefficients.n: family not valid on this domain");
    }
    if (c.eta) {
      const auto eta = make_eta(*c.eta);
      if (!eta.valid_on(c.domain.kind)) {
        throw ConfigError("coefficients.eta: family not valid on this domain");
      }
    }
    if (c.n && c.eta) CoefficientPair{make_n(*c.n), make_eta(*c.eta)}.validate(c.domain.kind);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("coefficients: ") + e.what());
  }

  s.read("task.count", c.count, parse_int);
  if (c.count < 1) throw ConfigError("task.count must be >= 1");
  s.read("task.mu_tolerance", c.mu_tolerance, parse_double);
  if (!(c.mu_tolerance >= 0.0 && c.mu_tolerance < 1.0)) throw ConfigError("task.mu_tolerance must be in [0, 1)");
  s.read("task.k_lo", c.window.k_lo, parse_double);
  s.read("task.k_hi", c.window.k_hi, parse_double);
  s.read("task.scan_step", c.window.scan_step, parse_double);
  s.read("task.m_max", c.window.m_max, parse_int);
  if (!(c.window.k_lo > 0.0 && c.window.k_hi > c.window.k_lo && c.window.scan_step > 0.0 &&
        c.window.m_max >= 0)) {
    throw ConfigError("task: need 0 < k_lo < k_hi, scan_step > 0 and m_max >= 0");
  }
  if ((c.window.k_hi - c.window.k_lo) / c.window.scan_step > 1e8) {
    throw ConfigError("task: scan window has too many steps");
  }
  s.read("task.compare_with_galerkin", c.compare_with_galerkin, parse_bool);

  if (auto r = s.get("task.regime")) {
    if (*r == "large_eta") {
      c.regime = Regime::LargeEta;
    } else if (*r == "small_eta") {
      c.regime = Regime::SmallEta;
    } else {
      throw ConfigError("task.regime: expected large_eta or small_eta, got '" + *r + "'");
    }
  }
  const bool poly_keys = s.get("task.poly_degree") || s.get("task.poly_samples") || s.get("task.n_lo") ||
                         s.get("task.n_hi");
  std::string method = "closed_form";
  if (auto m = s.get("task.method")) method = *m;
  if (method == "poly_fit") {
    PolyFit fit;
    s.read("task.poly_degree", fit.degree, parse_int);
    s.read("task.poly_samples", fit.samples, parse_int);
    s.read("task.n_lo", fit.n_lo, parse_double);
    s.read("task.n_hi", fit.n_hi, parse_double);
    if (fit.degree < 1 || fit.samples <= fit.degree || fit.samples > 10000 || !(fit.n_lo > 0.0) ||
        !(fit.n_hi > fit.n_lo)) {
      throw ConfigError("task: poly_fit needs degree >= 1, degree < samples <= 10000, 0 < n_lo < n_hi");
    }
    c.method = fit;
  } else if (method == "closed_form") {
    if (poly_keys) throw ConfigError("task: poly_* / n_lo / n_hi given without method = poly_fit");
    c.method = ClosedForm{};
  } else {
    throw ConfigError("task.method: expected closed_form or poly_fit, got '" + method + "'");
  }
  if (auto k = s.get("task.k1")) {
    c.k1 = parse_double("task.k1", *k);
    if (!(*c.k1 > 0.0)) throw ConfigError("task.k1 must be positive");
  }
  if (auto sizes = s.get("task.sizes")) {
    for (const auto& tok : split_list(*sizes)) c.sizes.push_back(parse_int("task.sizes", tok));
  }
  if (auto ref = s.get("task.reference")) {
    if (*ref == "none" || *ref == "cauchy") {
      c.reference = CauchyReference{};
    } else if (*ref == "exact") {
      c.reference = ExactReference{};
    } else {
      c.reference = parse_double("task.reference", *ref);
    }
  }

  if (auto f = s.get("output.format")) {
    if (*f == "csv") {
      c.format = OutputFormat::Csv;
    } else if (*f == "json") {
      c.format = OutputFormat::Json;
    } else {
      throw ConfigError("output.format: expected csv or json, got '" + *f + "'");
    }
  }
  s.read("output.path", c.out_path, [](const std::string&, const std::string& v) { return v; });
  s.read("output.grid", c.grid, parse_int);
  if (c.grid != 0 && (c.grid < 2 || c.grid > 2000)) throw ConfigError("output.grid must be 0 or in [2, 2000]");

  switch (task) {
    case Task::Compute:
      require_coefficients(c);
      break;
    case Task::Reference:
      (void)dispersion_query(c);
      if (c.compare_with_galerkin) (void)coefficients(c);
      break;
    case Task::Estimate:
      if (!c.k1) require_coefficients(c);
      if (c.regime == Regime::SmallEta && c.domain.kind == DomainKind::UnitSquare) {
        throw ConfigError("estimate: small_eta regime is unsupported on the square");
      }
      break;
    case Task::Convergence: {
      require_coefficients(c);
      if (c.sizes.size() < 3) throw ConfigError("task.sizes: need at least three basis sizes");
      for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        if (c.sizes[i] < 1 || (i > 0 && c.sizes[i] <= c.sizes[i - 1])) {
          throw ConfigError("task.sizes must be positive and strictly increasing");
        }
      }
      if (std::holds_alternative<ExactReference>(c.reference)) (void)dispersion_query(c);
      break;
    }
  }
  return c;
}

RunConfig load_config(const std::string& path, Task task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), task);
}

ComputeResult run_compute(const RunConfig& c) {
  const auto pair = coefficients(c);
  const auto basis = make_basis(c);
  const auto system = assemble(basis, pair.n, pair.eta);
  const auto spectrum = solve(system, SolveOptions{c.mu_tolerance});

  ComputeResult result;
  Table& t = result.table;
  t = base_table(c, "compute");
  add_basis_meta(t, basis.domain, basis.size());
  t.columns = {"index", "k_value", "k_type", "residual"};
  for (std::size_t i = 0; i < spectrum.pairs.size(); ++i) {
    const auto& p = spectrum.pairs[i];
    t.rows.push_back({static_cast<long>(i + 1), p.k,
                      std::string(p.kind == EigenKind::Real ? "real" : "imaginary"), p.residual});
  }
  if (c.grid > 0) {
    const std::size_t n_grids = std::min<std::size_t>(c.count, spectrum.real_count());
    for (std::size_t i = 0; i < n_grids; ++i) result.grids.push_back({i, grid_table(c, spectrum, i)});
  }
  return result;
}

Table run_reference(const RunConfig& c) {
  const auto q = dispersion_query(c);
  const auto roots = exact_eigenvalues(q, c.count);
  Table t = base_table(c, "reference");
  t.meta.emplace_back("m_max", std::to_string(q.m_max));
  t.meta.emplace_back("k_window", format_number(q.k_lo) + " " + format_number(q.k_hi));
  t.meta.emplace_back("scan_step", format_number(q.scan_step));
  t.columns = {"index", "m", "k_exact"};
  std::vector<double> computed;
  if (c.compare_with_galerkin) {
    const auto pair = coefficients(c);
    const auto basis = make_basis(c);
    add_basis_meta(t, basis.domain, basis.size());
    computed = solve(assemble(basis, pair.n, pair.eta), SolveOptions{c.mu_tolerance}).real_values();
    t.columns.push_back("rel_error_vs_compute");
  }
  for (std::size_t i = 0; i < roots.size(); ++i) {
    std::vector<Cell> row{static_cast<long>(i + 1), static_cast<long>(roots[i].m), roots[i].k};
    if (c.compare_with_galerkin) {
      if (i < computed.size()) {
        row.push_back(std::abs(computed[i] - roots[i].k) / roots[i].k);
      } else {
        row.push_back(std::monostate{});
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table run_estimate(const RunConfig& c) {
  Table t = base_table(c, "estimate");
  double k1 = 0.0;
  std::string source;
  if (c.k1) {
    k1 = *c.k1;
    source = "supplied";
  } else {
    const auto pair = coefficients(c);
    const auto basis = make_basis(c);
    add_basis_meta(t, basis.domain, basis.size());
    const auto spectrum = solve(assemble(basis, pair.n, pair.eta), SolveOptions{c.mu_tolerance});
    if (spectrum.real_count() == 0) throw NumericalError("estimate: no real eigenvalue computed");
    k1 = spectrum.real_values().front();
    source = "computed";
  }
  const double n_approx = estimate_n(k1, c.regime, c.domain.kind, c.method);
  Cell n_average = std::monostate{};
  if (c.n) n_average = average_value(make_n(*c.n), c.domain);

  t.columns = {"k1", "regime", "method", "n_approx", "k1_source", "n_average"};
  const bool poly = std::holds_alternative<PolyFit>(c.method);
  if (poly) {
    const auto& fit = std::get<PolyFit>(c.method);
    t.meta.emplace_back("poly_fit", "degree " + std::to_string(fit.degree) + ", samples " +
                                        std::to_string(fit.samples) + ", n in [" +
                                        format_number(fit.n_lo) + ", " + format_number(fit.n_hi) + "]");
  }
  t.rows.push_back({k1, std::string(to_string(c.regime)), std::string(poly ? "poly_fit" : "closed_form"),
                    n_approx, source, n_average});
  return t;
}

Table run_convergence(const RunConfig& c) {
  const auto pair = coefficients(c);
  std::optional<double> reference;
  if (std::holds_alternative<double>(c.reference)) {
    reference = std::get<double>(c.reference);
  } else if (std::holds_alternative<ExactReference>(c.reference)) {
    reference = exact_eigenvalues(dispersion_query(c), 1).front().k;
  }
  const auto table = convergence_study(c.domain, pair.n, pair.eta, c.sizes, reference, c.include_sine);

  Table t = base_table(c, "convergence");
  const auto largest = first_by_lambda(c.domain, c.sizes.back(), c.include_sine);
  add_basis_meta(t, resolved_quadrature(c.domain, largest), largest.size());
  t.meta.emplace_back("error_against", reference ? "reference " + format_number(*reference) : "finest level");
  t.columns = {"N", "k1", "error"};
  for (const auto& row : table.rows) t.rows.push_back({static_cast<long>(row.basis_size), row.k1, row.error});
  t.footer.emplace_back("slope", format_number(table.slope));
  return t;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::ostringstream out;
  out << "# zite " << t.title << "\n";
  for (const auto& [k, v] : t.meta) out << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << "\n";
  }
  for (const auto& [k, v] : t.footer) out << "# " << k << " = " << v << "\n";
  return out.str();
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json doc;
  doc["title"] = t.title;
  doc["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) doc["meta"][k] = v;
  doc["columns"] = t.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
    doc["rows"].push_back(obj);
  }
  doc["footer"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.footer) doc["footer"][k] = v;
  return doc.dump(2) + "\n";
}

namespace {

std::string render(const Table& t, OutputFormat f) { return f == OutputFormat::Json ? to_json(t) : to_csv(t); }

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  out << body;
  if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

std::string grid_path(const std::string& out_path, std::size_t index, OutputFormat f) {
  const std::string ext = f == OutputFormat::Json ? ".json" : ".csv";
  std::string stem = out_path.empty() ? std::string("eigenfunction") : out_path;
  const auto dot = stem.find_last_of('.');
  const auto slash = stem.find_last_of('/');
  if (!out_path.empty() && dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    stem.erase(dot);
  }
  return stem + "_eig" + std::to_string(index + 1) + ext;
}

int report_error(std::ostream& err, const char* kind, const std::string& message, int code) {
  nlohmann::ordered_json rec;
  rec["error"] = {{"kind", kind}, {"message", message}};
  rec["exit_code"] = code;
  err << rec.dump() << "\n";
  return code;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-index transmission eigenvalues by the Dirichlet spectral-Galerkin method"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_path;
  std::string format;
  int grid = -1;

  std::map<CLI::App*, Task> tasks;
  const std::pair<const char*, Task> names[] = {
      {"compute", Task::Compute},
      {"reference", Task::Reference},
      {"estimate", Task::Estimate},
      {"convergence", Task::Convergence},
  };
  const char* help[] = {
      "Galerkin eigenvalues with residuals",
      "Exact disk eigenvalues from the dispersion relation",
      "Constant refractive index estimate from k1",
      "First eigenvalue against basis size",
  };
  for (std::size_t i = 0; i < 4; ++i) {
    auto* sub = app.add_subcommand(names[i].first, help[i]);
    sub->add_option("--config", config_path, "INI run configuration")->required();
    sub->add_option("--out", out_path, "Output file (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--grid", grid, "Eigenfunction grid points per direction (compute)")
        ->check(CLI::Range(2, 2000));
    tasks[sub] = names[i].second;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, "usage", e.what(), 2);
  }

  try {
    const Task task = tasks.at(app.get_subcommands().front());
    RunConfig c = load_config(config_path, task);
    if (!out_path.empty()) c.out_path = out_path;
    if (!format.empty()) c.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (grid >= 0) c.grid = grid;
    if (c.grid > 0 && task != Task::Compute) throw ConfigError("--grid applies to compute only");

    std::string body;
    std::vector<std::pair<std::string, std::string>> extra;
    switch (task) {
      case Task::Compute: {
        auto result = run_compute(c);
        body = render(result.table, c.format);
        for (const auto& g : result.grids) {
          extra.emplace_back(grid_path(c.out_path, g.eigen_index, c.format), render(g.table, c.format));
        }
        break;
      }
      case Task::Reference: body = render(run_reference(c), c.format); break;
      case Task::Estimate: body = render(run_estimate(c), c.format); break;
      case Task::Convergence: body = render(run_convergence(c), c.format); break;
    }
    if (c.out_path.empty()) {
      out << body;
    } else {
      write_file(c.out_path, body);
    }
    for (const auto& [path, text] : extra) write_file(path, text);
    return 0;
  } catch (const ConfigError& e) {
    return report_error(err, "config", e.what(), 2);
  } catch (const std::invalid_argument& e) {
    return report_error(err, "config", e.what(), 2);
  } catch (const NumericalError& e) {
    return report_error(err, "numerical", e.what(), 3);
  } catch (const std::runtime_error& e) {
    return report_error(err, "numerical", e.what(), 3);
  } catch (const std::domain_error& e) {
    return report_error(err, "numerical", e.what(), 3);
  }
}

}  // namespace zite::cli
