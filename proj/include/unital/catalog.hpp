#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "unital/analytics.hpp"
#include "unital/incidence.hpp"
#include "unital/search.hpp"
#include "unital/unitals.hpp"

namespace unital {

inline constexpr const char* kToolVersion = "1.0.0";

// The planes of order 16 the fixtures refer to.
const std::vector<std::string>& plane_names();

// FNV-1a 64 of the labels in increasing order, joined by ','.
std::uint64_t point_set_checksum(std::vector<int> labels);
std::uint64_t fnv1a64(std::string_view bytes);

struct ExpectedRow {
  std::string plane;
  int index = 0;
  bool known = false;  // listed in earlier literature
  BigInt aut = 0;
  int rank5 = 0;
  std::uint64_t classes = 0;
  std::uint64_t dual_classes = 0;
  std::optional<std::string> isomorphic_to;
  // "listed" (point set in the fixtures), "derived" (constructed in code) or
  // "external" (point set unavailable).
  std::string source;
};

struct FixtureUnital {
  std::string plane_name;
  int index = 0;
  std::vector<int> points_listed;  // 1-based, as printed
  std::vector<int> points_1based;  // sorted
  std::uint64_t checksum = 0;
  std::optional<ExpectedRow> expected;
};

class Catalog {
public:
  // Reads fixtures/unitals.txt and fixtures/table.tsv under data_dir.
  // Throws Error(Parse) on malformed records or a checksum mismatch.
  static Catalog load(const std::filesystem::path& data_dir);

  const std::filesystem::path& data_dir() const { return data_dir_; }
  const std::vector<FixtureUnital>& fixtures() const { return fixtures_; }
  const std::vector<ExpectedRow>& expected() const { return expected_; }

  // Throws Error(UnknownFixture).
  const FixtureUnital& fixture(const std::string& plane, int index) const;
  const ExpectedRow* expected_row(const std::string& plane, int index) const;

private:
  std::filesystem::path data_dir_;
  std::vector<FixtureUnital> fixtures_;
  std::vector<ExpectedRow> expected_;
};

std::filesystem::path default_data_dir();

// Plane text format: a header of "key value" lines (name, order, points),
// then one line per block of 1-based indices.
void write_plane(std::ostream& out, const ProjectivePlane& plane);
// Throws Error(Parse) or any verify_plane error.
ProjectivePlane read_plane(std::istream& in);

std::filesystem::path plane_path(const std::filesystem::path& data_dir, const std::string& name);
// Throws Error(MissingPlaneData) if the file is absent.
PlanePtr load_plane(const std::filesystem::path& data_dir, const std::string& name);
bool has_plane(const std::filesystem::path& data_dir, const std::string& name);

// Tolerant reader for line-set files holding several planes. A line with
// a token that is not an integer opens a section named by that line; each
// following line of integers is a block. Labels are taken as 0-based if any
// block of the file contains 0, else as 1-based. Each section is verified
// as a plane of order (block size - 1). Numbers before the first name go
// into a section named "plane1".
std::vector<ProjectivePlane> import_plane_file(std::istream& in);

// Hermitian curve x^(q+1) + y^(q+1) + z^(q+1) = 0 in PG(2,q^2) built from
// coordinates; the points are indices of desarguesian_plane(q^2).
std::vector<int> hermitian_points(int q);
// The Hermitian unital of the given plane, which must be isomorphic to
// PG(2,q^2); the coordinate model is carried over by an isomorphism when
// the labelings differ. Throws Error(InvalidArgument) otherwise.
Unital hermitian_unital(const PlanePtr& plane);

// The unital a catalog row refers to: the fixture point set, or the
// Hermitian unital for the derived row. Throws Error(UnknownFixture) for
// rows without a point set.
Unital catalog_unital(const Catalog& catalog, const PlanePtr& plane, int index);

struct TableRow {
  ExpectedRow expected;
  DesignReport report;
  // Cells that differ: "aut", "rank5", "classes", "isomorphic_to".
  std::vector<std::string> mismatches;
  // When the fixture matches another row of its plane exactly instead.
  std::optional<int> matches_row;
};

// Recomputes every catalog row with a point set whose plane is in scope
// (all planes when scope is empty). Throws Error(MissingPlaneData) naming
// the missing plane files.
std::vector<TableRow> report_tables(const Catalog& catalog, const std::string& scope = {});

// Plane, index, |Aut|, 5-rank, "a/b", partner or "-"; tab separated.
std::string tsv_header();
std::string tsv_row(const DesignReport& r);
nlohmann::json report_json(const DesignReport& r);
nlohmann::json table_row_json(const TableRow& row);

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::optional<SearchBudget> budget;
  std::string started;   // ISO 8601 UTC
  std::string finished;
  std::map<std::string, std::string> input_digests;  // path -> fnv1a64 hex

  void add_input(const std::filesystem::path& file);
  nlohmann::json to_json() const;
};

std::string utc_now();
nlohmann::json budget_json(const SearchBudget& b);
nlohmann::json permutation_json(const Permutation& g);  // 1-based images
nlohmann::json search_hit_json(const PlaneSearchHit& hit, const SearchBudget& budget);

}  // namespace unital
