#include "helpers.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "unital/analytics.hpp"
#include "unital/autom.hpp"
#include "unital/catalog.hpp"

using namespace unital;
namespace fs = std::filesystem;

namespace {

const Catalog& catalog() {
  static const Catalog c = Catalog::load(default_data_dir());
  return c;
}

// Scratch data directory holding the fixtures and the listed planes.
struct TempData {
  fs::path dir;
  explicit TempData(const std::vector<PlanePtr>& planes) {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("unital-test-" + std::to_string(rd()));
    fs::create_directories(dir / "fixtures");
    fs::create_directories(dir / "planes");
    for (const char* f : {"table.tsv", "unitals.txt"})
      fs::copy_file(default_data_dir() / "fixtures" / f, dir / "fixtures" / f);
    for (const auto& p : planes) {
      std::ofstream out(plane_path(dir, p->name()));
      write_plane(out, *p);
    }
  }
  ~TempData() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(point_set_checksum({3, 1, 2}) == fnv1a64("1,2,3"));
}

TEST_CASE("fixture catalog") {
  const auto& c = catalog();
  CHECK(c.fixtures().size() == 93);
  std::map<std::string, int> per_plane;
  std::set<std::string> names(plane_names().begin(), plane_names().end());
  CHECK(names.size() == 13);
  for (const auto& f : c.fixtures()) {
    ++per_plane[f.plane_name];
    CHECK(names.count(f.plane_name));
    CHECK(f.points_listed.size() == 65);
    std::set<int> s(f.points_listed.begin(), f.points_listed.end());
    CHECK(s.size() == 65);
    CHECK(*s.begin() >= 1);
    CHECK(*s.rbegin() <= 273);
    CHECK(std::vector<int>(s.begin(), s.end()) == f.points_1based);
    CHECK(point_set_checksum(f.points_listed) == f.checksum);
    REQUIRE(f.expected.has_value());
    CHECK(f.expected->source == "listed");
  }
  std::map<std::string, int> want{{"BBH1", 6}, {"BBH2", 12}, {"BBS4", 3}, {"DEMP", 4},  {"DSFP", 2},
                                  {"HALL", 6}, {"JOHN", 8},  {"JOWK", 5}, {"LMRH", 2},  {"MATH", 16},
                                  {"SEMI2", 21}, {"SEMI4", 8}};
  CHECK(per_plane == want);

  const auto& b1 = c.fixture("BBH1", 1);
  CHECK(std::vector<int>(b1.points_listed.begin(), b1.points_listed.begin() + 6) ==
        std::vector<int>{257, 262, 263, 265, 264, 82});
  const auto& l2 = c.fixture("LMRH", 2);
  for (int p : {273, 7, 23, 28}) CHECK(std::count(l2.points_1based.begin(), l2.points_1based.end(), p) == 1);

  CHECK_ERRC(c.fixture("PG(2,16)", 2), Errc::UnknownFixture);
  CHECK_ERRC(c.fixture("BBH1", 99), Errc::UnknownFixture);

  const auto* herm = c.expected_row("PG(2,16)", 2);
  REQUIRE(herm != nullptr);
  CHECK(herm->source == "derived");
  CHECK(herm->aut == 249600);
  CHECK(herm->rank5 == 52);
  CHECK(herm->classes == 4304);
  CHECK(herm->isomorphic_to == std::optional<std::string>("PG(2,16)^T.2"));
  CHECK(c.expected_row("PG(2,16)", 1)->source == "external");
  CHECK(c.expected_row("NOPE", 1) == nullptr);
}

TEST_CASE("corrupted fixture files are rejected") {
  TempData t({});
  {
    std::ifstream in(t.dir / "fixtures" / "unitals.txt");
    std::stringstream ss;
    ss << in.rdbuf();
    auto text = ss.str();
    auto pos = text.find(" 257 262 263");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 4, " 258");
    std::ofstream out(t.dir / "fixtures" / "unitals.txt");
    out << text;
  }
  CHECK_ERRC(Catalog::load(t.dir), Errc::Parse);
}

TEST_CASE("plane files") {
  const auto& pg = *testing::pg16();
  std::stringstream ss;
  write_plane(ss, pg);
  auto back = read_plane(ss);
  CHECK(back.name() == "PG(2,16)");
  CHECK(back.order() == 16);
  CHECK(back.structure() == pg.structure());

  std::stringstream bad("name X\norder 2\npoints 7\n1 2 3\n");
  CHECK_THROWS_AS(read_plane(bad), Error);

  TempData t({});
  CHECK_FALSE(has_plane(t.dir, "BBH1"));
  CHECK_ERRC(load_plane(t.dir, "BBH1"), Errc::MissingPlaneData);
  CHECK(has_plane(default_data_dir(), "PG(2,16)"));
  CHECK(load_plane(default_data_dir(), "PG(2,16)")->structure() == pg.structure());
}

TEST_CASE("plane import") {
  std::stringstream zero("# Fano\n0 1 2\n0 3 4\n0 5 6\n1 3 5\n1 4 6\n2 3 6\n2 4 5\n");
  auto a = import_plane_file(zero);
  REQUIRE(a.size() == 1);
  CHECK(a[0].name() == "Fano");
  CHECK(a[0].order() == 2);
  CHECK(a[0].structure() == testing::fano());

  std::stringstream two("1 2 3\n1 4 5\n1 6 7\n2 4 6\n2 5 7\n3 4 7\n3 5 6\n>Second:\n1 2 4\n1 3 7\n1 5 6\n2 3 5\n2 6 7\n3 4 6\n4 5 7\n");
  auto b = import_plane_file(two);
  REQUIRE(b.size() == 2);
  CHECK(b[0].name() == "plane1");
  CHECK(b[1].name() == "Second");
  CHECK(is_isomorphic(b[0].structure(), testing::fano()).has_value());
  CHECK(is_isomorphic(b[1].structure(), testing::fano()).has_value());

  std::stringstream broken("1 2 3\n1 4 5\n1 2 6\n");
  CHECK_THROWS_AS(import_plane_file(broken), Error);
}

TEST_CASE("Hermitian unital under any labeling") {
  CHECK(hermitian_points(4) == testing::hermitian_by_brute_force(4));
  CHECK(hermitian_points(2) == testing::hermitian_by_brute_force(2));

  std::mt19937_64 rng(3);
  std::vector<int> perm(273);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto relabeled = std::make_shared<const ProjectivePlane>(
      verify_plane(testing::pg16()->structure().relabeled(perm), 16, "PG(2,16)"));
  auto u = hermitian_unital(relabeled);
  CHECK(is_unital(*relabeled, u.points));
  auto classical = design_from_unital(make_unital(testing::pg16(), hermitian_points(4)));
  CHECK(canonical_certificate(design_from_unital(u)) == canonical_certificate(classical));

  CHECK_ERRC(hermitian_unital(testing::hall16()), Errc::InvalidArgument);

  auto v = catalog_unital(catalog(), testing::pg16(), 2);
  CHECK(v.points == hermitian_points(4));
  CHECK_ERRC(catalog_unital(catalog(), testing::pg16(), 1), Errc::UnknownFixture);
}

TEST_CASE("table report") {
  TempData t({testing::pg16()});
  auto cat = Catalog::load(t.dir);
  auto rows = report_tables(cat, "PG(2,16)");
  REQUIRE(rows.size() == 1);
  const auto& r = rows[0];
  CHECK(r.mismatches.empty());
  CHECK_FALSE(r.matches_row.has_value());
  CHECK(r.report.unital_id == "2");
  CHECK(tsv_row(r.report) == "PG(2,16)\t2\t249600\t52\t4304/4304\tPG(2,16)^T.2");
  CHECK(tsv_header().find("plane\tunital") == 0);

  auto j = table_row_json(r);
  CHECK(j["design_aut_order"] == "249600");
  CHECK(j["rank5"] == 52);
  CHECK(j["isomorphic_to"] == "PG(2,16)^T.2");
  CHECK(j["certificate"].get<std::string>() == r.report.certificate.hex());

  CHECK_ERRC(report_tables(cat, "NOPE"), Errc::UnknownFixture);
  try {
    report_tables(cat);
    FAIL("expected MissingPlaneData");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingPlaneData);
    CHECK(std::string(e.what()).find("BBH1") != std::string::npos);
  }
}

TEST_CASE("run manifest") {
  RunManifest m;
  m.command = "search";
  m.seed = 42;
  SearchBudget b;
  b.max_nodes = 10;
  m.budget = b;
  m.started = utc_now();
  m.finished = utc_now();
  m.add_input(default_data_dir() / "fixtures" / "table.tsv");
  auto j = m.to_json();
  CHECK(j["command"] == "search");
  CHECK(j["seed"] == 42);
  CHECK(j["budget"]["max_nodes"] == 10);
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["started"].get<std::string>().size() == 20);
  CHECK(j["started"].get<std::string>().back() == 'Z');
  REQUIRE(j["input_digests"].size() == 1);
  CHECK(j["input_digests"].begin().value().get<std::string>().size() == 16);

  RunManifest empty;
  CHECK(empty.to_json()["seed"].is_null());
  CHECK(permutation_json(Permutation({1, 0, 2})) == nlohmann::json::array({2, 1, 3}));
}
