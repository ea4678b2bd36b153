#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "unital/catalog.hpp"
#include "unital/construct.hpp"
#include "unital/error.hpp"

using namespace unital;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

std::vector<int> parse_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    int x = std::stoi(tok, &used);
    if (used != tok.size()) throw Error(Errc::InvalidArgument, "bad list entry '" + tok + "'");
    out.push_back(x);
  }
  return out;
}

// "PLANE:N" is the design of fixture N, "PLANE^T:N" the design of its dual
// unital; anything else is read as a file in plane format without the
// order line.
IncidenceStructure load_design(const std::string& ref, const Catalog& cat) {
  auto colon = ref.rfind(':');
  if (colon != std::string::npos && !fs::exists(ref)) {
    std::string plane = ref.substr(0, colon);
    int index = std::stoi(ref.substr(colon + 1));
    bool dual = plane.size() > 2 && plane.substr(plane.size() - 2) == "^T";
    if (dual) plane.resize(plane.size() - 2);
    auto u = catalog_unital(cat, load_plane(cat.data_dir(), plane), index);
    return design_from_unital(dual ? dual_unital(u) : u);
  }
  std::ifstream in(ref);
  if (!in) throw Error(Errc::InvalidArgument, "no design file " + ref);
  long long points = -1;
  std::vector<Block> blocks;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream is(line);
    std::string first;
    if (!(is >> first) || first[0] == '#') continue;
    if (first == "name") continue;
    if (first == "points") {
      is >> points;
      continue;
    }
    Block b{std::stoi(first) - 1};
    int x = 0;
    while (is >> x) b.push_back(x - 1);
    blocks.push_back(std::move(b));
  }
  if (points < 1) throw Error(Errc::Parse, ref + ": missing points header");
  return IncidenceStructure(static_cast<int>(points), std::move(blocks));
}

void write_json(const fs::path& file, const nlohmann::json& j) {
  std::ofstream out(file);
  out << j.dump(2) << "\n";
}

// Writes manifest.json and the result file pointing at it.
void write_run(const fs::path& dir, const std::string& result_name, nlohmann::json result, RunManifest manifest) {
  fs::create_directories(dir);
  manifest.finished = utc_now();
  auto mj = manifest.to_json();
  write_json(dir / "manifest.json", mj);
  std::ostringstream digest;
  digest << std::hex << fnv1a64(mj.dump());
  result["manifest"] = {{"file", "manifest.json"}, {"fnv1a64", digest.str()}};
  write_json(dir / result_name, result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unitals in projective planes of order 16"};
  app.require_subcommand(1);
  std::string data = default_data_dir().string();
  app.add_option("--data", data, "Data directory (fixtures/, planes/)");

  auto* planes = app.add_subcommand("planes", "Plane line sets");
  planes->require_subcommand(1);
  auto* p_import = planes->add_subcommand("import", "Import a line-set file into the data directory");
  std::string import_file;
  p_import->add_option("file", import_file)->required()->check(CLI::ExistingFile);
  auto* p_verify = planes->add_subcommand("verify", "Check a stored plane");
  std::string verify_name;
  p_verify->add_option("name", verify_name)->required();
  auto* p_make = planes->add_subcommand("make-pg", "Write PG(2,n) from coordinates");
  int pg_order = 16;
  p_make->add_option("order", pg_order)->required();

  auto* check = app.add_subcommand("check", "Test whether a point set is a unital");
  std::string plane_name, points_arg;
  int fixture = 0;
  bool hermitian = false;
  check->add_option("--plane", plane_name)->required();
  auto* fix_opt = check->add_option("--fixture", fixture);
  auto* pts_opt = check->add_option("--points", points_arg, "1-based labels, comma separated");
  auto* herm_opt = check->add_flag("--hermitian", hermitian);
  fix_opt->excludes(pts_opt)->excludes(herm_opt);
  pts_opt->excludes(herm_opt);

  auto* analyze_cmd = app.add_subcommand("analyze", "Invariants of a catalog unital");
  std::string format = "tsv";
  analyze_cmd->add_option("--plane", plane_name)->required();
  analyze_cmd->add_option("--fixture", fixture)->required();
  analyze_cmd->add_option("--format", format)->check(CLI::IsMember({"tsv", "json"}));

  SearchBudget budget;
  auto add_budget = [&](CLI::App* cmd) {
    cmd->add_option("--max-subgroups", budget.max_subgroups);
    cmd->add_option("--max-nodes", budget.max_nodes);
    cmd->add_option("--time-ms", budget.wall_clock_ms);
  };
  auto* search = app.add_subcommand("search", "Orbit-union search for unitals");
  std::string orders_arg = "12,16,20", out_dir;
  search->add_option("--plane", plane_name)->required();
  search->add_option("--orders", orders_arg);
  search->add_option("--seed", budget.seed)->required();
  search->add_option("--out", out_dir, "Directory for results.json and manifest.json");
  add_budget(search);

  auto* design = app.add_subcommand("design", "Unital designs");
  design->require_subcommand(1);
  auto* iso = design->add_subcommand("iso", "Isomorphism test; PLANE:N, PLANE^T:N or a design file");
  std::string da, db;
  iso->add_option("a", da)->required();
  iso->add_option("b", db)->required();
  auto* embed = design->add_subcommand("embed", "Embed a design into a plane");
  embed->add_option("--design", da)->required();
  embed->add_option("--plane", plane_name)->required();
  add_budget(embed);

  auto* report = app.add_subcommand("report", "Reports");
  report->require_subcommand(1);
  auto* tables = report->add_subcommand("tables", "Recompute the reference table rows");
  std::string scope;
  tables->add_option("--scope", scope, "One plane name");
  tables->add_option("--format", format)->check(CLI::IsMember({"tsv", "json"}));
  tables->add_option("--out", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  RunManifest manifest;
  manifest.started = utc_now();
  for (int i = 1; i < argc; ++i) manifest.command += (i > 1 ? " " : "") + std::string(argv[i]);
  manifest.config["data"] = data;

  try {
    if (p_import->parsed()) {
      std::ifstream in(import_file);
      auto found = import_plane_file(in);
      fs::create_directories(fs::path(data) / "planes");
      for (const auto& pl : found) {
        auto path = plane_path(data, pl.name());
        {
          std::ofstream out(path);
          write_plane(out, pl);
        }
        std::ifstream back(path);
        auto again = read_plane(back);
        if (!(again.structure() == pl.structure())) throw std::runtime_error("round trip changed " + pl.name());
        std::cout << pl.name() << ": order " << pl.order() << " -> " << path.string() << "\n";
      }
      return found.empty() ? kFail : kOk;
    }
    if (p_verify->parsed()) {
      auto pl = load_plane(data, verify_name);
      std::cout << pl->name() << ": plane of order " << pl->order() << ", " << pl->num_points() << " points, "
                << pl->num_lines() << " lines\n";
      return kOk;
    }
    if (p_make->parsed()) {
      auto pl = desarguesian_plane(pg_order);
      fs::create_directories(fs::path(data) / "planes");
      std::ofstream out(plane_path(data, pl.name()));
      write_plane(out, pl);
      std::cout << plane_path(data, pl.name()).string() << "\n";
      return kOk;
    }

    auto cat = Catalog::load(data);
    if (check->parsed()) {
      auto pl = load_plane(data, plane_name);
      std::vector<int> pts;
      if (hermitian) {
        pts = hermitian_unital(pl).points;
      } else if (*fix_opt) {
        for (int p : cat.fixture(plane_name, fixture).points_1based) pts.push_back(p - 1);
      } else if (*pts_opt) {
        for (int p : parse_list(points_arg)) pts.push_back(p - 1);
      } else {
        std::cerr << "one of --fixture, --points, --hermitian is required\n";
        return kUsage;
      }
      auto r = check_unital(*pl, pts);
      if (r.ok) {
        std::cout << "unital: yes\n";
        return kOk;
      }
      std::cout << "unital: no (";
      if (r.line >= 0) std::cout << "line " << r.line + 1 << " meets the set in " << r.meets << " points";
      else std::cout << r.diagnostic;
      std::cout << ")\n";
      return kFail;
    }
    if (analyze_cmd->parsed()) {
      auto pl = load_plane(data, plane_name);
      auto u = catalog_unital(cat, pl, fixture);
      auto r = analyze(u, std::to_string(fixture));
      std::vector<DesignReport> one{r};
      match_partners(one);
      r = one[0];
      if (format == "json") std::cout << report_json(r).dump(2) << "\n";
      else std::cout << tsv_row(r) << "\n";
      if (!r.orders_agree())
        std::cerr << "note: stabilizer order " << r.stabilizer_order << " differs from design group order "
                  << r.design_aut_order << "\n";
      return kOk;
    }
    if (search->parsed()) {
      auto pl = load_plane(data, plane_name);
      auto orders_list = parse_list(orders_arg);
      std::set<int> orders(orders_list.begin(), orders_list.end());
      manifest.seed = budget.seed;
      manifest.budget = budget;
      manifest.config["plane"] = plane_name;
      manifest.config["orders"] = orders_list;
      manifest.add_input(plane_path(data, plane_name));
      auto res = search_plane(pl, orders, budget);
      std::map<Certificate, std::string> known;
      for (const auto& f : cat.fixtures())
        if (f.plane_name == plane_name)
          known.emplace(canonical_certificate(design_from_unital(catalog_unital(cat, pl, f.index))),
                        f.plane_name + "." + std::to_string(f.index));
      nlohmann::json hits = nlohmann::json::array();
      for (const auto& h : res.hits) {
        auto it = known.find(h.report.certificate);
        std::string match = it == known.end() ? "-" : it->second;
        std::cout << tsv_row(h.report) << "\tsubgroup " << h.subgroup_order << "\tfixture " << match << "\n";
        auto j = search_hit_json(h, budget);
        j["fixture"] = match;
        hits.push_back(j);
      }
      std::cout << res.hits.size() << " unitals from " << res.subgroups_searched << " subgroups"
                << (res.budget_exhausted ? " (budget exhausted)" : "") << "\n";
      if (!out_dir.empty())
        write_run(out_dir, "results.json",
                  {{"hits", hits}, {"budget_exhausted", res.budget_exhausted}, {"seed", budget.seed}}, manifest);
      return kOk;
    }
    if (iso->parsed()) {
      auto a = load_design(da, cat);
      auto b = load_design(db, cat);
      auto m = is_isomorphic(a, b);
      if (!m) {
        std::cout << "isomorphic: no\n";
        return kFail;
      }
      std::cout << "isomorphic: yes\nmap:";
      for (int x : m->images()) std::cout << " " << x + 1;
      std::cout << "\n";
      return kOk;
    }
    if (embed->parsed()) {
      auto d = load_design(da, cat);
      auto pl = load_plane(data, plane_name);
      auto r = embed_design_in_plane(d, *pl, budget);
      if (r.map) {
        std::cout << "embedding: found (" << r.nodes << " nodes)\nmap:";
        for (int p : *r.map) std::cout << " " << p + 1;
        std::cout << "\n";
        return kOk;
      }
      std::cout << (r.complete ? "embedding: none (search complete, " : "embedding: not found within budget (")
                << r.nodes << " nodes)\n";
      return kFail;
    }
    if (tables->parsed()) {
      auto rows = report_tables(cat, scope);
      bool clean = true;
      nlohmann::json arr = nlohmann::json::array();
      if (format == "tsv") std::cout << tsv_header() << "\tstatus\n";
      for (const auto& r : rows) {
        clean = clean && r.mismatches.empty();
        if (format == "tsv") {
          std::cout << tsv_row(r.report) << "\t";
          if (r.mismatches.empty()) {
            std::cout << "ok";
          } else {
            std::cout << "MISMATCH";
            for (const auto& m : r.mismatches) std::cout << " " << m;
            if (r.matches_row) std::cout << " (matches row " << *r.matches_row << ")";
          }
          std::cout << "\n";
        }
        arr.push_back(table_row_json(r));
      }
      if (format == "json") std::cout << arr.dump(2) << "\n";
      if (!out_dir.empty()) {
        manifest.config["scope"] = scope;
        manifest.add_input(fs::path(data) / "fixtures" / "unitals.txt");
        manifest.add_input(fs::path(data) / "fixtures" / "table.tsv");
        write_run(out_dir, "tables.json", {{"rows", arr}}, manifest);
      }
      return clean ? kOk : kFail;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::InvalidArgument:
      case Errc::UnknownFixture:
        return kUsage;
      default:
        return kFail;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
