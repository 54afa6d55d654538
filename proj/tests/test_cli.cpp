#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "zite/cli.hpp"
#include "zite/reference.hpp"

using namespace zite;
using namespace zite::cli;

namespace {

namespace fs = std::filesystem;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("zite_cli_" + std::to_string(std::rand()) + "_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "zite");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Data rows of a CSV table, split on commas.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string header_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') return line;
  }
  return {};
}

const char* kDisk25 = R"([domain]
kind = disk

[coefficients]
n = constant 4
eta = constant 25
)";

}  // namespace

TEST_CASE("number formatting is fixed at 12 significant digits") {
  CHECK(format_number(1.25192502551296) == "1.25192502551");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("FNV-1a hash") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("config parsing defaults and overrides") {
  const auto c = parse_config(kDisk25, Task::Compute);
  CHECK(c.domain.kind == DomainKind::UnitDisk);
  CHECK(c.domain.volume_order == 12);
  CHECK(c.p_max == 5);
  CHECK(c.q_max == 4);
  CHECK(c.n->tag == "constant");
  CHECK(c.eta->params == std::vector<double>{25.0});
  CHECK(c.format == OutputFormat::Csv);

  const auto sq = parse_config("[domain]\nkind = square\nquadrature_order = 20\n[coefficients]\nn = separable_poly\n"
                               "eta = constant 10\n[output]\nformat = json\ngrid = 5\n",
                               Task::Compute);
  CHECK(sq.q_max == 5);
  CHECK(sq.domain.volume_order == 20);
  CHECK(sq.domain.boundary_order == 20);
  CHECK(sq.n->params.empty());
  CHECK(sq.format == OutputFormat::Json);
  CHECK(sq.grid == 5);

  const auto est = parse_config("[task]\nk1 = 2.1\nregime = small_eta\nmethod = poly_fit\npoly_degree = 6\n",
                                Task::Estimate);
  REQUIRE(std::holds_alternative<PolyFit>(est.method));
  CHECK(std::get<PolyFit>(est.method).degree == 6);
  CHECK(std::get<PolyFit>(est.method).samples == 51);
  CHECK(est.k1.value() == 2.1);

  const auto conv = parse_config(std::string(kDisk25) + "[task]\nsizes = 8, 16, 24\nreference = exact\n",
                                 Task::Convergence);
  CHECK(conv.sizes == std::vector<int>{8, 16, 24});
  CHECK(std::holds_alternative<ExactReference>(conv.reference));
  CHECK(parse_config(kDisk25, Task::Compute).hash != parse_config(kDisk25, Task::Reference).hash);
}

TEST_CASE("config validation failures") {
  const std::string bad[] = {
      "[domain]\nkind = triangle\n[coefficients]\nn = constant 4\neta = constant 1\n",
      "[domain]\nvolume_order = 2\n[coefficients]\nn = constant 4\neta = constant 1\n",
      "[domain]\nkind = disk\n[coefficients]\nn = separable_poly\neta = constant 1\n",
      "[domain]\nkind = square\n[coefficients]\nn = constant 4\neta = inverse_angular 10 1\n",
      "[coefficients]\nn = constant 4\neta = constant 0\n",
      "[coefficients]\nn = constant four\neta = constant 1\n",
      "[coefficients]\nn = constant 4\neta = constant 1\nextra = 3\n",
      "[mystery]\nx = 1\n",
      "[coefficients]\nn = constant 4\n",
      "[coefficients]\nn = constant 4\neta = constant 1\n[task]\ncount = 0\n",
      "[coefficients]\nn = constant 4\neta = constant 1\n[output]\nformat = xml\n",
      "[coefficients]\nn = constant 4\neta = constant 1\n[task]\nmethod = poly_fit\npoly_degree = 9\npoly_samples = 5\n",
  };
  for (const auto& text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS((void)parse_config(text, Task::Compute), ConfigError);
  }
  CHECK_THROWS_AS((void)parse_config("[coefficients]\nn = radial_exp_bump 4 1\neta = constant 1\n", Task::Reference),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config("[domain]\nkind = square\n[coefficients]\nn = constant 4\neta = constant 1\n",
                                     Task::Reference),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config(std::string(kDisk25) + "[task]\nsizes = 8, 16\n", Task::Convergence),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config(std::string(kDisk25) + "[task]\nsizes = 8, 24, 16\n", Task::Convergence),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config("[domain]\nkind = square\n[task]\nk1 = 2\nregime = small_eta\n", Task::Estimate),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config("[task]\nregime = large_eta\n", Task::Estimate), ConfigError);
}

TEST_CASE("compute table for the disk") {
  const auto result = run_compute(parse_config(kDisk25, Task::Compute));
  const auto csv = to_csv(result.table);
  CHECK(header_line(csv) == "index,k_value,k_type,residual");
  CHECK(csv.find("# config_hash = ") != std::string::npos);
  CHECK(csv.find("# basis_size = 24") != std::string::npos);
  CHECK(csv.find("# quadrature = radial 12, angular 12, boundary 12") != std::string::npos);
  const auto rows = csv_rows(csv);
  REQUIRE_FALSE(rows.empty());
  CHECK(rows[0][0] == "1");
  CHECK(rows[0][2] == "real");
  // Matches the library solve to the printed precision.
  CHECK(std::abs(std::stod(rows[0][1]) - 1.25192502551) <= 1e-11);
  for (const auto& r : rows) CHECK(std::stod(r[3]) <= 1e-8);
  CHECK(result.grids.empty());
}

TEST_CASE("reference table with the Galerkin comparison column") {
  auto c = parse_config(std::string(kDisk25) + "[task]\ncompare_with_galerkin = true\n", Task::Reference);
  const auto csv = to_csv(run_reference(c));
  CHECK(header_line(csv) == "index,m,k_exact,rel_error_vs_compute");
  const auto rows = csv_rows(csv);
  REQUIRE(rows.size() == 3);
  CHECK(std::abs(std::stod(rows[0][2]) - 1.25132121108) <= 1e-11);
  CHECK(rows[1][1] == "1");
  const double rel = std::stod(rows[0][3]);
  CHECK(std::abs(rel - (1.25192502551 - 1.25132121108) / 1.25132121108) <= 1e-10);

  c.compare_with_galerkin = false;
  CHECK(header_line(to_csv(run_reference(c))) == "index,m,k_exact");
}

TEST_CASE("estimate tables") {
  const double t5 = limit_tau1(Regime::LargeEta, DomainKind::UnitDisk, 5.0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t5);
  const auto direct = run_estimate(parse_config(std::string("[task]\nk1 = ") + buf + "\n", Task::Estimate));
  CHECK(std::get<std::string>(direct.rows[0][4]) == "supplied");
  CHECK(std::abs(std::get<double>(direct.rows[0][3]) - 5.0) <= 1e-9);
  CHECK(header_line(to_csv(direct)) == "k1,regime,method,n_approx,k1_source,n_average");

  const auto pipeline = run_estimate(parse_config(
      "[coefficients]\nn = radial_exp_bump 4 1\neta = inverse_angular 10 1\n[task]\nregime = small_eta\n",
      Task::Estimate));
  CHECK(std::get<std::string>(pipeline.rows[0][4]) == "computed");
  const double n_approx = std::get<double>(pipeline.rows[0][3]);
  CHECK(n_approx >= 4.0);
  CHECK(n_approx <= 5.0);
  CHECK(std::abs(std::get<double>(pipeline.rows[0][5]) - 4.6321205588) <= 1e-9);

  const auto square = run_estimate(
      parse_config("[domain]\nkind = square\n[coefficients]\nn = constant 4\neta = constant 10\n", Task::Estimate));
  const double k1 = std::get<double>(square.rows[0][0]);
  CHECK(std::abs(std::get<double>(square.rows[0][3]) - 2.0 * std::numbers::pi * std::numbers::pi / (k1 * k1)) <=
        1e-10);
}

TEST_CASE("convergence table") {
  const auto t = run_convergence(
      parse_config(std::string(kDisk25) + "[task]\nsizes = 8, 16, 24, 36, 48\nreference = exact\n", Task::Convergence));
  const auto csv = to_csv(t);
  CHECK(header_line(csv) == "N,k1,error");
  REQUIRE(t.rows.size() == 5);
  CHECK(csv.find("# slope = ") != std::string::npos);
  CHECK(std::stod(t.footer.at(0).second) < 0.0);
}

TEST_CASE("JSON mirrors the CSV content") {
  const auto table = run_reference(parse_config(kDisk25, Task::Reference));
  const auto doc = nlohmann::json::parse(to_json(table));
  CHECK(doc["columns"] == nlohmann::json({"index", "m", "k_exact"}));
  const auto rows = csv_rows(to_csv(table));
  REQUIRE(doc["rows"].size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(doc["rows"][i]["index"].get<long>() == std::stol(rows[i][0]));
    CHECK(doc["rows"][i]["m"].get<long>() == std::stol(rows[i][1]));
    CHECK(format_number(doc["rows"][i]["k_exact"].get<double>()) == rows[i][2]);
  }
  CHECK(doc["meta"]["config_hash"].is_string());
}

TEST_CASE("command line: outputs, determinism and grid files") {
  Scratch s;
  const auto cfg = s.write("disk.ini", kDisk25);
  const auto out1 = (s.dir / "a.csv").string();
  const auto out2 = (s.dir / "b.csv").string();
  REQUIRE(run_cli({"compute", "--config", cfg, "--out", out1, "--grid", "9"}).code == 0);
  REQUIRE(run_cli({"compute", "--config", cfg, "--out", out2, "--grid", "9"}).code == 0);
  CHECK(read_file(out1) == read_file(out2));
  const auto grid = read_file((s.dir / "a_eig1.csv").string());
  CHECK(header_line(grid) == "x1,x2,value");
  const auto pts = csv_rows(grid);
  CHECK(pts.size() == 81);
  for (const auto& p : pts) {
    const double r = std::hypot(std::stod(p[0]), std::stod(p[1]));
    if (std::abs(r - 1.0) < 1e-12) CHECK(std::abs(std::stod(p[2])) <= 1e-9);
  }
  CHECK(fs::exists(s.dir / "a_eig3.csv"));

  const auto json = run_cli({"reference", "--config", cfg, "--format", "json"});
  CHECK(json.code == 0);
  CHECK(nlohmann::json::parse(json.out)["rows"].size() == 3);
}

TEST_CASE("command line: exit codes and error records") {
  Scratch s;
  const auto bad = s.write("bad.ini", "[coefficients]\nn = constant 4\neta = constant -1\n");
  const auto r = run_cli({"compute", "--config", bad});
  CHECK(r.code == 2);
  const auto rec = nlohmann::json::parse(r.err);
  CHECK(rec["error"]["kind"] == "config");
  CHECK(rec["exit_code"] == 2);

  CHECK(run_cli({"compute", "--config", (s.dir / "missing.ini").string()}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"compute"}).code == 2);

  const auto narrow = s.write("narrow.ini", std::string(kDisk25) + "[task]\nk_hi = 1.0\n");
  const auto n = run_cli({"reference", "--config", narrow});
  CHECK(n.code == 3);
  CHECK(nlohmann::json::parse(n.err)["error"]["kind"] == "numerical");

  const auto range = s.write("range.ini", "[task]\nk1 = 9.0\nmethod = poly_fit\n");
  CHECK(run_cli({"estimate", "--config", range}).code == 3);
}

TEST_CASE("installed binary reports exit codes") {
  Scratch s;
  const auto good = s.write("good.ini", kDisk25);
  const auto bad = s.write("bad.ini", "[domain]\nkind = sphere\n");
  const std::string bin = ZITE_BIN;
  const auto out = (s.dir / "out.csv").string();
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " 2>/dev/null").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(bin + " compute --config " + good + " --out " + out) == 0);
  CHECK(csv_rows(read_file(out)).size() > 3);
  CHECK(status(bin + " compute --config " + bad) == 2);
}
