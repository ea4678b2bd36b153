#include "unital/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "unital/construct.hpp"
#include "unital/error.hpp"

namespace unital {

namespace fs = std::filesystem;

const std::vector<std::string>& plane_names() {
  static const std::vector<std::string> names = {"PG(2,16)", "BBH1", "BBH2", "BBS4", "DEMP", "DSFP", "HALL",
                                                 "JOHN",     "JOWK", "LMRH", "MATH", "SEMI2", "SEMI4"};
  return names;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t point_set_checksum(std::vector<int> labels) {
  std::sort(labels.begin(), labels.end());
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(labels[i]);
  }
  return fnv1a64(s);
}

namespace {

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

bool parse_int(std::string_view tok, long long& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::ifstream open_or_throw(const fs::path& p, Errc code) {
  std::ifstream in(p);
  if (!in) throw Error(code, "cannot read " + p.string());
  return in;
}

}  // namespace

Catalog Catalog::load(const fs::path& data_dir) {
  Catalog c;
  c.data_dir_ = data_dir;
  {
    auto in = open_or_throw(data_dir / "fixtures" / "table.tsv", Errc::Parse);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      auto f = split_tabs(line);
      long long idx = 0, known = 0, rank = 0, cl = 0, dcl = 0;
      if (f.size() != 9 || !parse_int(f[1], idx) || !parse_int(f[2], known) || !parse_int(f[4], rank) ||
          !parse_int(f[5], cl) || !parse_int(f[6], dcl))
        throw Error(Errc::Parse, "table.tsv line " + std::to_string(lineno));
      ExpectedRow r;
      r.plane = f[0];
      r.index = static_cast<int>(idx);
      r.known = known != 0;
      r.aut = BigInt(f[3]);
      r.rank5 = static_cast<int>(rank);
      r.classes = static_cast<std::uint64_t>(cl);
      r.dual_classes = static_cast<std::uint64_t>(dcl);
      if (f[7] != "-") r.isomorphic_to = f[7];
      r.source = f[8];
      c.expected_.push_back(std::move(r));
    }
  }
  auto in = open_or_throw(data_dir / "fixtures" / "unitals.txt", Errc::Parse);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tok = split_ws(line);
    long long idx = 0;
    if (tok.size() < 3 || !parse_int(tok[1], idx)) throw Error(Errc::Parse, "unitals.txt line " + std::to_string(lineno));
    FixtureUnital f;
    f.plane_name = tok[0];
    f.index = static_cast<int>(idx);
    f.checksum = std::stoull(tok[2], nullptr, 16);
    for (std::size_t i = 3; i < tok.size(); ++i) {
      long long x = 0;
      if (!parse_int(tok[i], x)) throw Error(Errc::Parse, "unitals.txt line " + std::to_string(lineno));
      f.points_listed.push_back(static_cast<int>(x));
    }
    f.points_1based = f.points_listed;
    std::sort(f.points_1based.begin(), f.points_1based.end());
    if (point_set_checksum(f.points_1based) != f.checksum)
      throw Error(Errc::Parse, "checksum mismatch for " + f.plane_name + " #" + std::to_string(f.index));
    if (const auto* row = c.expected_row(f.plane_name, f.index)) f.expected = *row;
    c.fixtures_.push_back(std::move(f));
  }
  return c;
}

const FixtureUnital& Catalog::fixture(const std::string& plane, int index) const {
  for (const auto& f : fixtures_)
    if (f.plane_name == plane && f.index == index) return f;
  throw Error(Errc::UnknownFixture, plane + " #" + std::to_string(index) + " has no listed point set");
}

const ExpectedRow* Catalog::expected_row(const std::string& plane, int index) const {
  for (const auto& r : expected_)
    if (r.plane == plane && r.index == index) return &r;
  return nullptr;
}

fs::path default_data_dir() { return fs::path(UNITAL_DEFAULT_DATA_DIR); }

void write_plane(std::ostream& out, const ProjectivePlane& plane) {
  out << "name " << plane.name() << "\norder " << plane.order() << "\npoints " << plane.num_points() << "\n";
  for (const auto& b : plane.structure().blocks()) {
    for (std::size_t i = 0; i < b.size(); ++i) out << (i ? " " : "") << b[i] + 1;
    out << "\n";
  }
}

ProjectivePlane read_plane(std::istream& in) {
  std::string line, name;
  long long order = -1, points = -1;
  std::vector<Block> blocks;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    long long x = 0;
    if (!parse_int(tok[0], x)) {
      if (tok.size() != 2) throw Error(Errc::Parse, "plane file line " + std::to_string(lineno));
      if (tok[0] == "name") name = tok[1];
      else if (tok[0] == "order" && parse_int(tok[1], order)) {}
      else if (tok[0] == "points" && parse_int(tok[1], points)) {}
      else throw Error(Errc::Parse, "plane file line " + std::to_string(lineno) + ": bad header");
      continue;
    }
    Block b;
    for (const auto& t : tok) {
      if (!parse_int(t, x) || x < 1 || x > points)
        throw Error(Errc::Parse, "plane file line " + std::to_string(lineno) + ": bad label " + t);
      b.push_back(static_cast<int>(x - 1));
    }
    blocks.push_back(std::move(b));
  }
  if (order < 2 || points < 1 || name.empty()) throw Error(Errc::Parse, "plane file header incomplete");
  return verify_plane(IncidenceStructure(static_cast<int>(points), std::move(blocks)), static_cast<int>(order), name);
}

fs::path plane_path(const fs::path& data_dir, const std::string& name) {
  return data_dir / "planes" / (name + ".plane");
}

bool has_plane(const fs::path& data_dir, const std::string& name) { return fs::exists(plane_path(data_dir, name)); }

PlanePtr load_plane(const fs::path& data_dir, const std::string& name) {
  auto p = plane_path(data_dir, name);
  std::ifstream in(p);
  if (!in) throw Error(Errc::MissingPlaneData, "no line set for plane " + name + " (" + p.string() + ")");
  return std::make_shared<const ProjectivePlane>(read_plane(in));
}

std::vector<ProjectivePlane> import_plane_file(std::istream& in) {
  struct Section {
    std::string name;
    std::vector<std::vector<long long>> rows;
  };
  std::vector<Section> sections;
  std::string line;
  bool zero = false;
  while (std::getline(in, line)) {
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    std::vector<long long> nums;
    bool numeric = true;
    for (const auto& t : tok) {
      long long x = 0;
      if (!parse_int(t, x)) {
        numeric = false;
        break;
      }
      nums.push_back(x);
    }
    if (!numeric) {
      std::string name = line;
      auto strip = [](char ch) { return std::isspace(static_cast<unsigned char>(ch)) || ch == '#' || ch == ':' || ch == '>' || ch == '"'; };
      while (!name.empty() && strip(name.front())) name.erase(name.begin());
      while (!name.empty() && strip(name.back())) name.pop_back();
      sections.push_back({name, {}});
      continue;
    }
    if (sections.empty()) sections.push_back({"plane1", {}});
    for (auto x : nums) zero = zero || x == 0;
    sections.back().rows.push_back(std::move(nums));
  }
  std::vector<ProjectivePlane> out;
  for (auto& s : sections) {
    if (s.rows.empty()) continue;
    int k = static_cast<int>(s.rows.front().size());
    int v = static_cast<int>(s.rows.size());
    std::vector<Block> blocks;
    for (const auto& r : s.rows) {
      Block b;
      for (auto x : r) {
        long long y = zero ? x : x - 1;
        if (y < 0 || y >= v) throw Error(Errc::Parse, "section " + s.name + ": label " + std::to_string(x) + " out of range");
        b.push_back(static_cast<int>(y));
      }
      blocks.push_back(std::move(b));
    }
    out.push_back(verify_plane(IncidenceStructure(v, std::move(blocks)), k - 1, s.name));
  }
  return out;
}

std::vector<int> hermitian_points(int q) {
  DesarguesianModel m(q * q);
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(m.points.size()); ++i) {
    int s = 0;
    for (int c : m.points[i]) s = m.field.add(s, m.field.pow(c, q + 1));
    if (s == 0) out.push_back(i);
  }
  return out;
}

Unital hermitian_unital(const PlanePtr& plane) {
  int q = unital_parameter(*plane);
  auto model = desarguesian_plane(q * q);
  auto pts = hermitian_points(q);
  if (!(model.structure() == plane->structure())) {
    auto iso = is_isomorphic(model.structure(), plane->structure());
    if (!iso) throw Error(Errc::InvalidArgument, plane->name() + " is not isomorphic to " + model.name());
    for (int& p : pts) p = (*iso)[p];
  }
  return make_unital(plane, std::move(pts));
}

Unital catalog_unital(const Catalog& catalog, const PlanePtr& plane, int index) {
  const auto* row = catalog.expected_row(plane->name(), index);
  if (row && row->source == "derived") return hermitian_unital(plane);
  const auto& f = catalog.fixture(plane->name(), index);
  std::vector<int> pts;
  for (int p : f.points_1based) pts.push_back(p - 1);
  return make_unital(plane, std::move(pts));
}

namespace {

std::vector<std::string> compare_row(const ExpectedRow& e, const DesignReport& r) {
  std::vector<std::string> bad;
  if (r.design_aut_order != e.aut && r.stabilizer_order != e.aut) bad.push_back("aut");
  if (r.p_rank_5 != e.rank5) bad.push_back("rank5");
  if (r.parallel_classes != e.classes || r.dual_parallel_classes != e.dual_classes) bad.push_back("classes");
  if (r.isomorphic_partner != e.isomorphic_to) bad.push_back("isomorphic_to");
  return bad;
}

}  // namespace

std::vector<TableRow> report_tables(const Catalog& catalog, const std::string& scope) {
  std::vector<const ExpectedRow*> rows;
  std::set<std::string> planes;
  for (const auto& e : catalog.expected()) {
    if (!scope.empty() && e.plane != scope) continue;
    if (e.source == "external") continue;
    rows.push_back(&e);
    planes.insert(e.plane);
  }
  if (!scope.empty() && rows.empty()) {
    bool known = std::find(plane_names().begin(), plane_names().end(), scope) != plane_names().end();
    if (!known) throw Error(Errc::UnknownFixture, "no plane named " + scope);
  }
  std::string missing;
  for (const auto& p : planes)
    if (!has_plane(catalog.data_dir(), p)) missing += (missing.empty() ? "" : ", ") + p;
  if (!missing.empty()) throw Error(Errc::MissingPlaneData, "no line set for " + missing);

  std::map<std::string, PlanePtr> loaded;
  std::vector<TableRow> out;
  std::vector<DesignReport> reports;
  for (const auto* e : rows) {
    auto& plane = loaded[e->plane];
    if (!plane) plane = load_plane(catalog.data_dir(), e->plane);
    auto u = catalog_unital(catalog, plane, e->index);
    TableRow row;
    row.expected = *e;
    row.report = analyze(u, std::to_string(e->index));
    out.push_back(std::move(row));
  }
  for (const auto& r : out) reports.push_back(r.report);
  match_partners(reports);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].report.isomorphic_partner = reports[i].isomorphic_partner;
    out[i].mismatches = compare_row(out[i].expected, out[i].report);
  }
  // A listing out of order shows up as a fixture matching a different row
  // of its own plane.
  for (auto& row : out) {
    if (row.mismatches.empty()) continue;
    for (const auto& e : catalog.expected())
      if (e.plane == row.expected.plane && e.index != row.expected.index && compare_row(e, row.report).empty()) {
        row.matches_row = e.index;
        break;
      }
  }
  return out;
}

std::string tsv_header() { return "plane\tunital\taut\trank5\tclasses\tisomorphic_to"; }

std::string tsv_row(const DesignReport& r) {
  std::ostringstream os;
  os << r.plane << '\t' << r.unital_id << '\t' << r.design_aut_order << '\t' << r.p_rank_5 << '\t'
     << r.parallel_classes << '/' << r.dual_parallel_classes << '\t' << r.isomorphic_partner.value_or("-");
  return os.str();
}

nlohmann::json report_json(const DesignReport& r) {
  nlohmann::json j;
  j["plane"] = r.plane;
  j["unital"] = r.unital_id;
  j["stabilizer_order"] = r.stabilizer_order.str();
  j["design_aut_order"] = r.design_aut_order.str();
  j["orders_agree"] = r.orders_agree();
  j["rank5"] = r.p_rank_5;
  j["parallel_classes"] = r.parallel_classes;
  j["dual_parallel_classes"] = r.dual_parallel_classes;
  j["certificate"] = r.certificate.hex();
  j["dual_certificate"] = r.dual_certificate.hex();
  j["isomorphic_to"] = r.isomorphic_partner ? nlohmann::json(*r.isomorphic_partner) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json table_row_json(const TableRow& row) {
  auto j = report_json(row.report);
  const auto& e = row.expected;
  j["expected"] = {{"aut", e.aut.str()},
                   {"rank5", e.rank5},
                   {"parallel_classes", e.classes},
                   {"dual_parallel_classes", e.dual_classes},
                   {"isomorphic_to", e.isomorphic_to ? nlohmann::json(*e.isomorphic_to) : nlohmann::json(nullptr)}};
  j["mismatches"] = row.mismatches;
  if (row.matches_row) j["matches_row"] = *row.matches_row;
  return j;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void RunManifest::add_input(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  input_digests[file.string()] = hex64(fnv1a64(ss.str()));
}

nlohmann::json budget_json(const SearchBudget& b) {
  return {{"max_subgroups", b.max_subgroups},
          {"max_nodes", b.max_nodes},
          {"wall_clock_ms", b.wall_clock_ms},
          {"seed", b.seed}};
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  j["budget"] = budget ? budget_json(*budget) : nlohmann::json(nullptr);
  j["tool_version"] = kToolVersion;
  j["started"] = started;
  j["finished"] = finished;
  j["input_digests"] = input_digests;
  return j;
}

nlohmann::json permutation_json(const Permutation& g) {
  nlohmann::json j = nlohmann::json::array();
  for (int x : g.images()) j.push_back(x + 1);
  return j;
}

nlohmann::json search_hit_json(const PlaneSearchHit& hit, const SearchBudget& budget) {
  nlohmann::json j;
  j["plane"] = hit.unital.plane->name();
  nlohmann::json pts = nlohmann::json::array();
  for (int p : hit.unital.points) pts.push_back(p + 1);
  j["points"] = pts;
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : hit.subgroup_generators) gens.push_back(permutation_json(g));
  j["subgroup"] = {{"order", hit.subgroup_order}, {"generators", gens}};
  j["seed"] = budget.seed;
  j["budget"] = budget_json(budget);
  j["certificate"] = hit.report.certificate.hex();
  j["report"] = report_json(hit.report);
  return j;
}

}  // namespace unital
