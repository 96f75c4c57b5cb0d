#include "fixtures.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "metaforge/db/sqlite.hpp"
#include "metaforge/util/hash.hpp"
#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::testing {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const char* kFresnoQuestion =
    "Please list the zip code of all the charter schools in Fresno County Office of Education.";
const char* kFresnoFirstSql =
    "SELECT T2.Zip FROM frpm AS T1 INNER JOIN schools AS T2 ON T1.CDSCode = T2.CDSCode "
    "WHERE T1.`Charter School (Y/N)` = 1 AND T1.`County Name` = 'Fresno County Office of Education'";
const char* kFresnoRevisedSql =
    "SELECT T2.Zip FROM frpm AS T1 INNER JOIN schools AS T2 ON T1.CDSCode = T2.CDSCode "
    "WHERE T1.`Charter School (Y/N)` = 1 AND T2.District = 'Fresno County Office of Education'";

namespace {

std::string sql_quote(const std::string& value) {
  std::string out = "'";
  for (char c : value) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += "'";
  return out;
}

std::uint64_t h(std::uint64_t salt, std::uint64_t i) { return hash::splitmix64_at(salt, i); }

// The ten lexicographically smallest codes, matching the pinned top-k list.
const std::vector<std::string>& smallest_codes() {
  static const std::vector<std::string> kCodes = {
      "01100170109835", "01100170112607", "01100170118489", "01100170123968",
      "01100170124172", "01100170125567", "01100170130401", "01100170130419",
      "01100176001788", "01100176002000"};
  return kCodes;
}

constexpr const char* kMaxCode = "58727695838305";

std::vector<std::string> make_cds_codes() {
  std::vector<std::string> codes = smallest_codes();
  // 9975 further codes strictly between the tenth-smallest and the maximum.
  const std::uint64_t lo = 1100176002001ULL;
  const std::uint64_t hi = 58727695838304ULL;
  std::unordered_set<std::uint64_t> seen;
  std::uint64_t i = 0;
  while (seen.size() < 9975) {
    std::uint64_t v = lo + h(0xc0de5, i++) % (hi - lo + 1);
    seen.insert(v);
  }
  std::vector<std::uint64_t> extra(seen.begin(), seen.end());
  std::sort(extra.begin(), extra.end());
  for (auto v : extra) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%014llu", static_cast<unsigned long long>(v));
    codes.push_back(buf);
  }
  codes.push_back(kMaxCode);
  std::sort(codes.begin(), codes.end());
  return codes;
}

const std::vector<std::string>& counties() {
  static const std::vector<std::string> kCounties = {
      "Fresno",      "Alameda",    "Sacramento", "Los Angeles", "San Diego",  "Orange",
      "Riverside",   "Kern",       "Ventura",    "Sonoma",      "Stanislaus", "Tulare",
      "Santa Clara", "San Mateo",  "Monterey",   "Placer",      "Merced",     "Butte",
      "Yolo",        "Imperial",   "Napa",       "Kings",       "Madera",     "Lake",
      "Humboldt",    "Shasta",     "El Dorado",  "Solano",      "Marin",      "Mendocino"};
  return kCounties;
}

std::string district_for(std::size_t i, const std::string& county) {
  // County offices of education run a slice of each county's rows.
  if (h(0xd157, i) % 7 == 0 &&
      (county == "Fresno" || county == "Sacramento" || county == "Alameda")) {
    return county + " County Office of Education";
  }
  return county + (h(0xd158, i) % 2 == 0 ? " Unified" : " Union Elementary");
}

std::string school_name(std::size_t i) {
  static const std::vector<std::string> kPrefixes = {
      "Washington", "Lincoln", "Jefferson", "Roosevelt", "Madison", "Monroe",
      "Jackson",    "Harding", "Tyler",     "Adams",     "Sierra",  "Valley",
      "Oak Grove",  "Riverside", "Sunset",  "Meadow",    "Hillside", "Lakeview"};
  static const std::vector<std::string> kTypes = {
      "Elementary", "Middle", "High", "Academy", "Community Day", "Preparatory"};
  return kPrefixes[h(0x5c11, i) % kPrefixes.size()] + " " +
         kTypes[h(0x5c12, i) % kTypes.size()];
}

std::string city_for(const std::string& county, std::size_t i) {
  if (county == "Fresno") return h(0xc171, i) % 3 == 0 ? "Fresno" : "Clovis";
  if (county == "Alameda") return h(0xc171, i) % 2 == 0 ? "Oakland" : "Berkeley";
  return county;  // county seat named after the county; fine at desk scale
}

std::string zip_for(const std::string& county, std::size_t i) {
  if (county == "Fresno" && h(0x21b, i) % 11 == 0) return "93721";
  char buf[8];
  std::snprintf(buf, sizeof buf, "9%04llu",
                static_cast<unsigned long long>(h(0x21c, i) % 10000));
  return buf;
}

}  // namespace

void build_california_schools(const fs::path& sqlite_path) {
  fs::create_directories(sqlite_path.parent_path());
  fs::remove(sqlite_path);
  db::Database db(sqlite_path, /*writable=*/true);

  db.exec(R"(CREATE TABLE schools (
    CDSCode TEXT PRIMARY KEY,
    County TEXT,
    District TEXT,
    School TEXT,
    City TEXT,
    Zip TEXT,
    Charter INTEGER,
    OpenDate TEXT,
    ClosedDate TEXT,
    LastUpdate TEXT))");
  db.exec(R"(CREATE TABLE frpm (
    CDSCode TEXT PRIMARY KEY,
    `Academic Year` TEXT,
    `County Code` TEXT,
    `District Code` TEXT,
    `County Name` TEXT,
    `District Name` TEXT,
    `School Name` TEXT,
    `Charter School (Y/N)` INTEGER,
    `Charter Funding Type` TEXT,
    `Enrollment (K-12)` REAL,
    `Free Meal Count (K-12)` REAL,
    FOREIGN KEY (CDSCode) REFERENCES schools (CDSCode)))");
  db.exec(R"(CREATE TABLE satscores (
    cds TEXT PRIMARY KEY,
    rtype TEXT,
    sname TEXT,
    dname TEXT,
    cname TEXT,
    enroll12 INTEGER,
    NumTstTakr INTEGER,
    AvgScrMath INTEGER,
    NumGE1500 INTEGER))");

  auto codes = make_cds_codes();

  // Extra schools codes beyond frpm (Jaccard(frpm, schools) = 9986/12000).
  std::vector<std::string> extra_codes;
  std::unordered_set<std::uint64_t> seen;
  std::uint64_t j = 0;
  while (extra_codes.size() < 2014) {
    std::uint64_t v = 58727695838306ULL + h(0xe47a, j++) % 40000000000000ULL;
    if (!seen.insert(v).second) continue;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%014llu", static_cast<unsigned long long>(v));
    extra_codes.push_back(buf);
  }

  db.exec("BEGIN");
  std::string batch;
  auto flush = [&](const char* prefix) {
    if (batch.empty()) return;
    db.exec(std::string(prefix) + batch);
    batch.clear();
  };

  auto school_row = [&](const std::string& code, std::size_t i) {
    const auto& county = counties()[h(0xc0, i) % counties().size()];
    auto district = district_for(i, county);
    bool charter = h(0xc4, i) % 4 == 0;
    bool closed = h(0xdead, i) % 17 == 0;
    std::string open_date =
        h(0x0d, i) % 9 == 0
            ? "NULL"
            : sql_quote("19" + std::to_string(50 + h(0x0e, i) % 50) + "-0" +
                        std::to_string(1 + h(0x0f, i) % 9) + "-15");
    std::string closed_date =
        closed ? sql_quote("20" + std::to_string(10 + h(0x10, i) % 9) + "-06-30") : "NULL";
    return "(" + sql_quote(code) + "," + sql_quote(county) + "," + sql_quote(district) + "," +
           sql_quote(school_name(i)) + "," + sql_quote(city_for(county, i)) + "," +
           sql_quote(zip_for(county, i)) + "," + (charter ? "1" : "0") + "," + open_date + "," +
           closed_date + ",'2015-06-30')";
  };

  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (!batch.empty()) batch += ",";
    batch += school_row(codes[i], i);
    if (i % 400 == 399) flush("INSERT INTO schools VALUES ");
  }
  for (std::size_t i = 0; i < extra_codes.size(); ++i) {
    if (!batch.empty()) batch += ",";
    batch += school_row(extra_codes[i], codes.size() + i);
    if (i % 400 == 399) flush("INSERT INTO schools VALUES ");
  }
  flush("INSERT INTO schools VALUES ");

  for (std::size_t i = 0; i < codes.size(); ++i) {
    const auto& county = counties()[h(0xc0, i) % counties().size()];
    auto district = district_for(i, county);
    bool charter = h(0xc4, i) % 4 == 0;
    bool charter_null = h(0xcf, i) % 13 == 0;
    char county_code[4], district_code[8];
    std::snprintf(county_code, sizeof county_code, "%02llu",
                  static_cast<unsigned long long>(h(0xc0, i) % counties().size() + 1));
    std::snprintf(district_code, sizeof district_code, "%05llu",
                  static_cast<unsigned long long>(h(0xd1, i) % 100000));
    double enrollment = 20 + static_cast<double>(h(0xe0, i) % 29800) / 10.0;
    bool meals_null = h(0xf0, i) % 10 == 0;
    double meals = enrollment * static_cast<double>(h(0xf1, i) % 100) / 100.0;
    std::string funding = charter ? (h(0xfd, i) % 2 == 0 ? sql_quote("Directly funded")
                                                         : sql_quote("Locally funded"))
                                  : "NULL";
    if (!batch.empty()) batch += ",";
    batch += "(" + sql_quote(codes[i]) + ",'2014-2015'," + sql_quote(county_code) + "," +
             sql_quote(district_code) + "," + sql_quote(county) + "," + sql_quote(district) +
             "," + sql_quote(school_name(i)) + "," +
             (charter_null ? "NULL" : (charter ? "1" : "0")) + "," + funding + "," +
             strings::canonical_real(enrollment) + "," +
             (meals_null ? "NULL" : strings::canonical_real(meals)) + ")";
    if (i % 400 == 399) flush("INSERT INTO frpm VALUES ");
  }
  flush("INSERT INTO frpm VALUES ");

  for (std::size_t i = 0; i < 2000; ++i) {
    const auto& county = counties()[h(0xc0, i) % counties().size()];
    auto district = district_for(i, county);
    bool math_null = h(0xa1, i) % 12 == 0;
    if (!batch.empty()) batch += ",";
    batch += "(" + sql_quote(codes[i]) + ",'S'," + sql_quote(school_name(i)) + "," +
             sql_quote(district) + "," + sql_quote(county) + "," +
             std::to_string(50 + h(0xa2, i) % 900) + "," + std::to_string(h(0xa3, i) % 700) +
             "," + (math_null ? "NULL" : std::to_string(300 + h(0xa4, i) % 300)) + "," +
             std::to_string(h(0xa5, i) % 200) + ")";
    if (i % 400 == 399) flush("INSERT INTO satscores VALUES ");
  }
  flush("INSERT INTO satscores VALUES ");
  db.exec("COMMIT");
}

void write_description_csvs(const fs::path& dir) {
  fs::create_directories(dir);
  io::atomic_write(dir / "frpm.csv",
                   "original_column_name,column_name,column_description,data_format,value_description\n"
                   "CDSCode,,CDSCode,text,\n"
                   "Academic Year,,Academic year of the record,text,\n"
                   "County Code,,County code,text,\n"
                   "District Code,,District code,text,\n"
                   "County Name,,County name,text,\n"
                   "District Name,,District name,text,\n"
                   "School Name,,School name,text,\n"
                   "Charter School (Y/N),,Whether the school is a charter school,integer,0: N;1: Y\n"
                   "Charter Funding Type,,Charter school funding type,text,\n"
                   "Enrollment (K-12),,Enrollment for grades K through 12,real,\n"
                   "Free Meal Count (K-12),,Free meal count for grades K through 12,real,\n");
  // A cp1252 right single quote (0x92) exercises the byte cleanup.
  std::string schools_csv =
      "original_column_name,column_name,column_description,data_format,value_description\n"
      "CDSCode,,CDSCode,text,\n"
      "County,,County where the school is located,text,\n"
      "District,,District the school belongs to,text,\n";
  schools_csv += "School,,The school\x92s name,text,\n";
  schools_csv +=
      "City,,City where the school is located,text,\n"
      "Zip,,Zip code of the school,text,\n"
      "Charter,,Whether the school is a charter school,integer,0: N;1: Y\n"
      "OpenDate,,Date the school opened,date,\n"
      "ClosedDate,,Date the school closed,date,\n"
      "LastUpdate,,Date the record was last updated,date,\n";
  io::atomic_write(dir / "schools.csv", schools_csv);
  io::atomic_write(dir / "satscores.csv",
                   "original_column_name,column_name,column_description,data_format,value_description\n"
                   "cds,,California Department Schools,text,\n"
                   "rtype,,Record type,text,\n"
                   "sname,,School name,text,\n"
                   "dname,,District name,text,\n"
                   "cname,,County name,text,\n"
                   "enroll12,,Enrollment in grade 12,integer,\n"
                   "NumTstTakr,,Number of test takers,integer,\n"
                   "AvgScrMath,,Average math score,integer,\n"
                   "NumGE1500,,Number of test takers whose total SAT scores are greater or equal to 1500,integer,\n");
}

// --- dev 6-24 replica ------------------------------------------------------

namespace {

struct PairSpec {
  std::string db, child_table, child_col, parent_table, parent_col;
  bool documented = false;  // declared via FOREIGN KEY
  bool observed = false;    // appears in the gold log
  bool patched = false;     // declared with a broken (column-less) reference
};

struct TableSpec {
  std::set<std::string> columns;
  std::vector<std::string> fk_clauses;
};

const std::vector<std::string>& dev_dbs() {
  static const std::vector<std::string> kDbs = {
      "california_schools",      "card_games",  "codebase_community",
      "debit_card_specializing", "european_football_2", "financial",
      "formula_1",               "student_club", "superhero",
      "thrombosis_prediction",   "toxicology"};
  return kDbs;
}

std::vector<PairSpec> dev_replica_pairs() {
  std::vector<PairSpec> pairs;
  auto add = [&](const std::string& db, const std::string& ct, const std::string& cc,
                 const std::string& pt, const std::string& pc, bool doc, bool obs,
                 bool patched = false) {
    pairs.push_back({db, ct, cc, pt, pc, doc, obs, patched});
  };

  // Documented and used (PRAGMA-visible).
  add("california_schools", "frpm", "CDSCode", "schools", "CDSCode", true, true);
  add("toxicology", "connected", "bond_id", "bond", "bond_id", true, true);
  add("toxicology", "atom", "molecule_id", "molecule", "molecule_id", true, true);
  add("toxicology", "bond", "molecule_id", "molecule", "molecule_id", true, true);
  add("financial", "card", "disp_id", "disp", "disp_id", true, true);
  add("financial", "disp", "client_id", "client", "client_id", true, true);
  add("financial", "disp", "account_id", "account", "account_id", true, true);
  add("codebase_community", "comments", "PostId", "posts", "Id", true, true);

  // Broken declarations, fixed by hand (the patch file).
  add("debit_card_specializing", "yearmonth", "CustomerID", "customers", "CustomerID", true,
      true, true);
  add("european_football_2", "Match", "league_id", "League", "id", true, true, true);
  add("european_football_2", "Match", "country_id", "Country", "id", true, true, true);

  // Observed but never documented.
  add("california_schools", "satscores", "cds", "schools", "CDSCode", false, true);
  add("card_games", "cards", "setCode", "sets", "code", false, true);
  add("card_games", "legalities", "format", "maxbanned", "format", false, true);
  add("debit_card_specializing", "gasstations", "GasStationID", "transactions_1k",
      "GasStationID", false, true);
  add("thrombosis_prediction", "Examination", "ID", "Laboratory", "ID", false, true);
  add("superhero", "superhero", "eye_colour_id", "colour", "id", false, true);
  add("superhero", "superhero", "hair_colour_id", "colour", "id", false, true);
  add("formula_1", "results", "raceId", "pitStops", "raceId", false, true);
  add("formula_1", "results", "driverId", "pitStops", "driverId", false, true);
  add("financial", "disp", "account_id", "loan", "account_id", false, true);

  // Documented but never used in the log.
  add("toxicology", "connected", "atom_id", "atom", "atom_id", true, false);
  add("toxicology", "connected", "atom_id2", "atom", "atom_id", true, false);
  add("european_football_2", "Match", "away_player_11", "Player", "player_api_id", true,
      false);
  add("financial", "loan", "account_id", "account", "account_id", true, false);

  // Generic padding to the frozen totals: 69 documented+used, 17
  // undocumented+observed, 20 documented+unused.
  const std::vector<int> used_per_db = {7, 7, 7, 6, 6, 6, 6, 6, 6, 6, 6};
  const std::vector<int> undoc_per_db = {2, 2, 2, 2, 2, 1, 1, 1, 1, 2, 1};
  const std::vector<int> unused_per_db = {2, 2, 2, 2, 2, 2, 2, 2, 2, 1, 1};
  for (std::size_t d = 0; d < dev_dbs().size(); ++d) {
    const auto& db = dev_dbs()[d];
    for (int k = 0; k < used_per_db[d]; ++k) {
      auto key = "used" + std::to_string(k) + "_key";
      add(db, "log_used" + std::to_string(k), key, "ref_used" + std::to_string(k), key, true,
          true);
    }
    for (int k = 0; k < undoc_per_db[d]; ++k) {
      auto key = "found" + std::to_string(k) + "_key";
      add(db, "log_found" + std::to_string(k), key, "ref_found" + std::to_string(k), key,
          false, true);
    }
    for (int k = 0; k < unused_per_db[d]; ++k) {
      auto key = "idle" + std::to_string(k) + "_key";
      add(db, "log_idle" + std::to_string(k), key, "ref_idle" + std::to_string(k), key, true,
          false);
    }
  }
  return pairs;
}

/// Anchor tables with the extra columns the styled log queries reference.
void seed_anchor_tables(std::map<std::string, std::map<std::string, TableSpec>>& tables) {
  auto& cs = tables["california_schools"];
  cs["frpm"].columns.insert({"CDSCode", "County Name", "Charter School (Y/N)"});
  cs["schools"].columns.insert({"CDSCode", "School", "District", "Zip"});
  cs["satscores"].columns.insert({"cds", "NumGE1500"});

  auto& cg = tables["card_games"];
  cg["cards"].columns.insert({"id", "name", "setCode"});
  cg["sets"].columns.insert({"id", "code"});
  cg["legalities"].columns.insert({"id", "format", "uuid"});
  cg["maxbanned"].columns.insert({"format"});

  auto& cc = tables["codebase_community"];
  cc["comments"].columns.insert({"Id", "PostId", "Score"});
  cc["posts"].columns.insert({"Id", "CommentCount", "Score"});

  auto& dc = tables["debit_card_specializing"];
  dc["customers"].columns.insert({"CustomerID", "Segment", "Currency"});
  dc["yearmonth"].columns.insert({"CustomerID", "Date", "Consumption"});
  dc["gasstations"].columns.insert({"GasStationID", "ChainID"});
  dc["transactions_1k"].columns.insert({"TransactionID", "GasStationID"});

  auto& ef = tables["european_football_2"];
  ef["League"].columns.insert({"id", "name"});
  ef["Country"].columns.insert({"id", "name"});
  ef["Player"].columns.insert({"player_api_id", "player_name"});
  ef["Match"].columns.insert({"id", "league_id", "country_id", "away_player_11"});

  auto& fin = tables["financial"];
  fin["account"].columns.insert({"account_id", "district_id"});
  fin["client"].columns.insert({"client_id", "gender"});
  fin["disp"].columns.insert({"disp_id", "client_id", "account_id"});
  fin["card"].columns.insert({"card_id", "disp_id"});
  fin["loan"].columns.insert({"loan_id", "account_id"});

  auto& f1 = tables["formula_1"];
  f1["results"].columns.insert({"resultId", "raceId", "driverId"});
  f1["pitStops"].columns.insert({"raceId", "driverId", "stop"});

  auto& sh = tables["superhero"];
  sh["superhero"].columns.insert({"id", "superhero_name", "eye_colour_id", "hair_colour_id"});
  sh["colour"].columns.insert({"id", "colour"});

  auto& th = tables["thrombosis_prediction"];
  th["Examination"].columns.insert({"ID", "Thrombosis"});
  th["Laboratory"].columns.insert({"ID", "Date", "RF"});

  auto& tox = tables["toxicology"];
  tox["atom"].columns.insert({"atom_id", "molecule_id", "element"});
  tox["bond"].columns.insert({"bond_id", "molecule_id", "bond_type"});
  tox["connected"].columns.insert({"atom_id", "atom_id2", "bond_id"});
  tox["molecule"].columns.insert({"molecule_id", "label"});
}

/// Styled log queries: pair key "db|child.ccol=parent.pcol" (both
/// directions checked) -> query text covering it. Everything uncovered
/// falls back to a plain count join.
struct StyledQuery {
  std::string db;
  std::string sql;
  std::vector<std::string> covers;  // "child.ccol=parent.pcol" raw keys
};

std::vector<StyledQuery> styled_queries() {
  std::vector<StyledQuery> queries;
  queries.push_back(
      {"california_schools",
       "SELECT T1.`County Name` FROM frpm AS T1 INNER JOIN schools AS T2 ON T1.CDSCode = "
       "T2.CDSCode WHERE T2.Zip = '93721'",
       {"frpm.CDSCode=schools.CDSCode"}});
  queries.push_back(
      {"california_schools",
       "SELECT T2.School FROM satscores AS T1 INNER JOIN schools AS T2 ON T1.cds = T2.CDSCode "
       "WHERE T1.NumGE1500 > 0",
       {"satscores.cds=schools.CDSCode"}});
  queries.push_back(
      {"toxicology",
       "SELECT substr(T1.bond_id, 1, 7) AS atom_id1, T1.molecule_id || substr(T1.bond_id, 8, "
       "2) AS atom_id2 FROM bond AS T1 WHERE T1.bond_type = '-'",
       {}});
  queries.push_back(
      {"toxicology",
       "SELECT T1.bond_type FROM bond AS T1 INNER JOIN connected AS T2 ON T1.molecule_id || "
       "'_' || '1' = T2.atom_id AND T1.molecule_id || '_' || '2' = T2.atom_id2 AND T1.bond_id "
       "= T2.bond_id",
       {"connected.bond_id=bond.bond_id"}});
  queries.push_back(
      {"toxicology",
       "SELECT count(DISTINCT CASE WHEN T1.element = 'i' THEN T1.atom_id ELSE NULL END) AS "
       "iodine_nums FROM atom AS T1 INNER JOIN molecule AS T2 ON T1.molecule_id = "
       "T2.molecule_id WHERE T2.label = '+'",
       {"atom.molecule_id=molecule.molecule_id"}});
  queries.push_back(
      {"toxicology",
       "SELECT m.label FROM bond AS b, molecule AS m WHERE b.molecule_id = m.molecule_id AND "
       "b.bond_type = '='",
       {"bond.molecule_id=molecule.molecule_id"}});
  queries.push_back(
      {"financial",
       "SELECT T1.card_id FROM card AS T1 INNER JOIN disp AS T2 ON T1.disp_id = T2.disp_id "
       "INNER JOIN client AS T3 ON T3.client_id = T2.client_id INNER JOIN loan AS T4 ON "
       "T2.account_id = T4.account_id",
       {"card.disp_id=disp.disp_id", "disp.client_id=client.client_id",
        "disp.account_id=loan.account_id"}});
  queries.push_back(
      {"financial",
       "SELECT count(*) FROM disp AS d INNER JOIN account AS a ON d.account_id = a.account_id",
       {"disp.account_id=account.account_id"}});
  queries.push_back(
      {"codebase_community",
       "SELECT COUNT(T1.Id) FROM comments AS T1 INNER JOIN posts AS T2 ON T1.PostId = T2.Id "
       "WHERE T2.CommentCount = 1 AND T2.Score = 0",
       {"comments.PostId=posts.Id"}});
  queries.push_back(
      {"debit_card_specializing",
       "SELECT count(*) FROM yearmonth AS T1 INNER JOIN customers AS T2 ON T1.CustomerID = "
       "T2.CustomerID WHERE T1.Consumption > 100.0",
       {"yearmonth.CustomerID=customers.CustomerID"}});
  queries.push_back(
      {"debit_card_specializing",
       "SELECT count(*) FROM gasstations AS T1 INNER JOIN transactions_1k AS T2 ON "
       "T1.GasStationID = T2.GasStationID",
       {"gasstations.GasStationID=transactions_1k.GasStationID"}});
  queries.push_back(
      {"european_football_2",
       "SELECT count(*) FROM Match AS T1 INNER JOIN League AS T2 ON T1.league_id = T2.id",
       {"Match.league_id=League.id"}});
  queries.push_back(
      {"european_football_2",
       "SELECT T2.name FROM Match AS T1 INNER JOIN Country AS T2 ON T1.country_id = T2.id",
       {"Match.country_id=Country.id"}});
  queries.push_back(
      {"thrombosis_prediction",
       "SELECT count(DISTINCT T1.ID) FROM Examination AS T1 INNER JOIN Laboratory AS T2 ON "
       "T1.ID = T2.ID WHERE CAST(T2.RF AS REAL) < 20",
       {"Examination.ID=Laboratory.ID"}});
  queries.push_back(
      {"superhero",
       "SELECT T1.superhero_name FROM superhero AS T1 INNER JOIN colour AS T2 ON T2.id = "
       "T1.eye_colour_id AND T2.id = T1.hair_colour_id WHERE T2.colour = 'Amber'",
       {"superhero.eye_colour_id=colour.id", "superhero.hair_colour_id=colour.id"}});
  queries.push_back(
      {"formula_1",
       "SELECT count(*) FROM results AS T1 INNER JOIN pitStops AS T2 ON T1.raceId = T2.raceId "
       "AND T1.driverId = T2.driverId",
       {"results.raceId=pitStops.raceId", "results.driverId=pitStops.driverId"}});
  queries.push_back(
      {"card_games",
       "SELECT T1.name FROM cards AS T1 INNER JOIN sets AS T2 ON T1.setCode = T2.code LIMIT 5",
       {"cards.setCode=sets.code"}});
  queries.push_back(
      {"card_games",
       "SELECT count(*) FROM legalities AS T1 INNER JOIN maxbanned AS T2 ON T1.format = "
       "T2.format",
       {"legalities.format=maxbanned.format"}});
  return queries;
}

}  // namespace

void build_dev_replica(const fs::path& replica_root, const fs::path& log_path,
                       const fs::path& fk_patch_path) {
  auto pairs = dev_replica_pairs();

  // Frozen totals; the fixture fails fast when an edit breaks them.
  std::size_t documented = 0, observed = 0, undocumented = 0, unused = 0, patched = 0;
  for (const auto& p : pairs) {
    if (p.documented && !p.patched) ++documented;
    if (p.patched) ++patched;
    if (p.observed) ++observed;
    if (p.observed && !p.documented) ++undocumented;
    if (p.documented && !p.observed) ++unused;
  }
  if (documented != 101 || patched != 3 || observed != 107 || undocumented != 27 ||
      unused != 24) {
    throw Error(ErrorKind::config,
                "dev replica totals drifted: documented=" + std::to_string(documented) +
                    " patched=" + std::to_string(patched) + " observed=" +
                    std::to_string(observed) + " undocumented=" + std::to_string(undocumented) +
                    " unused=" + std::to_string(unused));
  }

  // Collect table specs.
  std::map<std::string, std::map<std::string, TableSpec>> tables;
  seed_anchor_tables(tables);
  for (const auto& p : pairs) {
    tables[p.db][p.child_table].columns.insert(p.child_col);
    tables[p.db][p.parent_table].columns.insert(p.parent_col);
    if (p.documented && !p.patched) {
      tables[p.db][p.child_table].fk_clauses.push_back(
          "FOREIGN KEY (" + db::quote_sql_identifier(p.child_col) + ") REFERENCES " +
          db::quote_sql_identifier(p.parent_table) + " (" +
          db::quote_sql_identifier(p.parent_col) + ")");
    } else if (p.patched) {
      tables[p.db][p.child_table].fk_clauses.push_back(
          "FOREIGN KEY (" + db::quote_sql_identifier(p.child_col) + ") REFERENCES " +
          db::quote_sql_identifier(p.parent_table));
    }
  }

  // Write the schema-only databases (benchmark layout).
  for (const auto& [db_name, specs] : tables) {
    auto dir = replica_root / db_name;
    fs::create_directories(dir);
    auto path = dir / (db_name + ".sqlite");
    fs::remove(path);
    db::Database database(path, /*writable=*/true);
    // Parents before children so the FK clauses always reference existing
    // tables (SQLite tolerates forward references, but ordering keeps the
    // schema readable).
    std::vector<std::string> names;
    for (const auto& [name, spec] : specs) names.push_back(name);
    std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
      bool a_has_fk = !specs.at(a).fk_clauses.empty();
      bool b_has_fk = !specs.at(b).fk_clauses.empty();
      if (a_has_fk != b_has_fk) return !a_has_fk;
      return a < b;
    });
    for (const auto& name : names) {
      const auto& spec = specs.at(name);
      std::string ddl = "CREATE TABLE " + db::quote_sql_identifier(name) + " (";
      bool first = true;
      for (const auto& col : spec.columns) {
        if (!first) ddl += ", ";
        first = false;
        ddl += db::quote_sql_identifier(col) + " TEXT";
      }
      for (const auto& fk : spec.fk_clauses) ddl += ", " + fk;
      ddl += ")";
      database.exec(ddl);
    }
  }

  // The gold log: styled queries for the anchor pairs, plain joins for the
  // rest, one reversed duplicate to exercise normalization.
  std::set<std::string> covered;
  auto styled = styled_queries();
  for (const auto& q : styled) {
    for (const auto& key : q.covers) covered.insert(q.db + "|" + key);
  }

  std::string log_lines;
  int id = 0;
  auto emit = [&](const std::string& db_name, const std::string& sql_text) {
    ordered_json j;
    j["id"] = "q" + std::to_string(++id);
    j["db_id"] = db_name;
    j["sql"] = sql_text;
    log_lines += j.dump() + "\n";
  };
  for (const auto& q : styled) emit(q.db, q.sql);
  for (const auto& p : pairs) {
    if (!p.observed) continue;
    auto key = p.db + "|" + p.child_table + "." + p.child_col + "=" + p.parent_table + "." +
               p.parent_col;
    if (covered.count(key)) continue;
    emit(p.db, "SELECT count(*) FROM " + db::quote_sql_identifier(p.child_table) +
                   " AS a INNER JOIN " + db::quote_sql_identifier(p.parent_table) +
                   " AS b ON a." + db::quote_sql_identifier(p.child_col) + " = b." +
                   db::quote_sql_identifier(p.parent_col));
  }
  // A reversed-side duplicate: normalization must collapse it.
  emit("california_schools",
       "SELECT count(*) FROM schools AS s INNER JOIN frpm AS f ON s.CDSCode = f.CDSCode");
  io::atomic_write(log_path, log_lines);

  // The hand-fix patch for the three broken declarations.
  ordered_json patch = ordered_json::array();
  auto patch_entry = [&](const std::string& db_name, const std::string& ct,
                         const std::string& cc, const std::string& pt, const std::string& pc) {
    ordered_json j;
    j["db"] = db_name;
    j["child_table"] = ct;
    j["child_field"] = cc;
    j["parent_table"] = pt;
    j["parent_field"] = pc;
    patch.push_back(std::move(j));
  };
  patch_entry("debit_card_specializing", "yearmonth", "CustomerID", "customers", "CustomerID");
  patch_entry("european_football_2", "Match", "league_id", "League", "id");
  patch_entry("european_football_2", "Match", "country_id", "Country", "id");
  io::atomic_write(fk_patch_path, patch.dump(2) + "\n");
}

// --- questions, train pairs, transport --------------------------------------

namespace {

struct FixtureQuestion {
  int id;
  std::string question, evidence, difficulty, gold, scripted;  // scripted == "" -> gold
};

std::vector<FixtureQuestion> fixture_questions() {
  std::vector<FixtureQuestion> qs;
  qs.push_back({0, kFresnoQuestion,
                "Charter schools refers to `Charter School (Y/N)` = 1 in the table frpm",
                "moderate", kFresnoRevisedSql, ""});
  qs.push_back({1, "How many schools are there in the county of Alameda?", "", "simple",
                "SELECT count(*) FROM schools WHERE County = 'Alameda'", ""});
  qs.push_back({2, "What is the largest K-12 enrollment recorded in the free meal program?",
                "largest enrollment refers to max(`Enrollment (K-12)`)", "simple",
                "SELECT max(`Enrollment (K-12)`) FROM frpm", ""});
  qs.push_back({3, "List the names of schools in the city of Fresno.", "", "simple",
                "SELECT School FROM schools WHERE City = 'Fresno'", ""});
  qs.push_back({4, "How many test takers were there at schools in Fresno County?", "",
                "moderate",
                "SELECT sum(T1.NumTstTakr) FROM satscores AS T1 INNER JOIN schools AS T2 ON "
                "T1.cds = T2.CDSCode WHERE T2.County = 'Fresno'",
                ""});
  qs.push_back({5, "What is the average math score of schools in the Fresno Unified district?",
                "", "simple",
                "SELECT avg(T1.AvgScrMath) FROM satscores AS T1 WHERE T1.dname = 'Fresno "
                "Unified'",
                ""});
  qs.push_back({6, "How many charter schools are there in the free meal program?",
                "Charter schools refers to `Charter School (Y/N)` = 1", "simple",
                "SELECT count(*) FROM frpm WHERE `Charter School (Y/N)` = 1", ""});
  qs.push_back({7, "Which schools have a zip code of 93721?", "", "simple",
                "SELECT School FROM schools WHERE Zip = '93721'", ""});
  qs.push_back({8, "How many distinct districts appear in the schools table?", "", "simple",
                "SELECT count(DISTINCT District) FROM schools", ""});
  // Scripted prediction deliberately disagrees with gold: one match=false row.
  qs.push_back({9, "How many schools are currently closed?", "", "moderate",
                "SELECT count(*) FROM schools WHERE ClosedDate IS NOT NULL",
                "SELECT count(*) FROM schools"});
  return qs;
}

}  // namespace

void write_questions_json(const fs::path& path) {
  ordered_json arr = ordered_json::array();
  for (const auto& q : fixture_questions()) {
    ordered_json j;
    j["question_id"] = q.id;
    j["db_id"] = "california_schools";
    j["question"] = q.question;
    j["evidence"] = q.evidence;
    j["difficulty"] = q.difficulty;
    j["SQL"] = q.gold;
    arr.push_back(std::move(j));
  }
  io::atomic_write(path, arr.dump(2) + "\n");
}

void write_train_pairs_json(const fs::path& path) {
  ordered_json arr = ordered_json::array();
  auto add = [&](const std::string& q, const std::string& s) {
    ordered_json j;
    j["question"] = q;
    j["SQL"] = s;
    arr.push_back(std::move(j));
  };
  add(kFresnoQuestion, kFresnoRevisedSql);  // self-exclusion path for question 0
  add("How many schools are there in the county of Sacramento?",
      "SELECT count(*) FROM schools WHERE County = 'Sacramento'");
  add("List the zip codes of schools in the city of Clovis.",
      "SELECT Zip FROM schools WHERE City = 'Clovis'");
  add("What is the smallest K-12 enrollment in the free meal program?",
      "SELECT min(`Enrollment (K-12)`) FROM frpm");
  add("How many SAT test takers scored at least 1500 in Alameda County?",
      "SELECT sum(T1.NumGE1500) FROM satscores AS T1 INNER JOIN schools AS T2 ON T1.cds = "
      "T2.CDSCode WHERE T2.County = 'Alameda'");
  add("Which districts are run by the Sacramento County Office of Education?",
      "SELECT DISTINCT District FROM schools WHERE District = 'Sacramento County Office of "
      "Education'");
  add("How many schools opened before 1980?",
      "SELECT count(*) FROM schools WHERE OpenDate < '1980-01-01'");
  io::atomic_write(path, arr.dump(2) + "\n");
}

std::shared_ptr<ScriptedTransport> make_california_transport() {
  auto transport = std::make_shared<ScriptedTransport>();
  transport->summaries["frpm.cdscode"] =
      "The CDSCode column stores unique 14-character numeric identifiers for each school in "
      "the database, where CDS stands for County-District-School.";
  transport->summaries["schools.cdscode"] =
      "The CDSCode column stores the unique County-District-School code of each school.";
  transport->summaries["satscores.cds"] =
      "The cds column stores the County-District-School code linking SAT results to schools.";
  transport->summaries["frpm.academic year"] =
      "The 'Academic Year' column stores the academic year for each record in the format "
      "'YYYY-YYYY'.";
  transport->summaries["schools.zip"] =
      "The Zip column stores the postal zip code of each school.";
  transport->summaries["schools.district"] =
      "The District column stores the name of the district that operates each school.";

  for (const auto& q : fixture_questions()) {
    auto sql_text = q.scripted.empty() ? q.gold : q.scripted;
    if (q.id == 0) {
      transport->link_sql[q.question] = kFresnoFirstSql;
      transport->revise_sql[q.question] = kFresnoRevisedSql;
      transport->generated_sql[q.question] = kFresnoRevisedSql;
    } else {
      transport->link_sql[q.question] = sql_text;
      transport->generated_sql[q.question] = sql_text;
    }
  }
  return transport;
}

void ensure_fixtures(const FixturePaths& paths) {
  if (fs::exists(paths.marker())) return;
  fs::create_directories(paths.root);
  build_california_schools(paths.california_db());
  write_description_csvs(paths.bird_root() / "california_schools" / "database_description");
  build_dev_replica(paths.dev_replica_root(), paths.dev_log(), paths.fk_patch());
  write_questions_json(paths.questions());
  write_train_pairs_json(paths.train_pairs());
  io::atomic_write(paths.marker(), "ok\n");
}

void build_stores(const FixturePaths& paths, llm::Gateway& gateway,
                  const llm::PromptSet& prompts) {
  db::Database database(paths.california_db());
  bird::StorePaths store{paths.california_stores()};

  profile::ProfileStore profiles;
  for (const auto& table : database.table_names()) {
    profiles.put(profile::profile_table(database, table));
  }
  profiles.save(store.profiles());

  auto descriptors = summarize::build_descriptors(
      database, profiles,
      paths.bird_root() / "california_schools" / "database_description", gateway, prompts);
  io::atomic_write(store.descriptors(), summarize::to_json(descriptors));

  std::string lines;
  for (const auto& table : database.table_names()) {
    for (const auto& col : database.columns(table)) {
      lines += index::to_json(index::build_value_index(database, {table, col.name}));
    }
  }
  io::atomic_write(store.value_indexes(), lines);

  std::vector<std::pair<FieldRef, std::string>> summaries;
  for (const auto& d : descriptors) {
    if (d.long_summary) summaries.emplace_back(d.ref(), *d.long_summary);
  }
  io::atomic_write(store.semantic(),
                   index::to_json(index::build_semantic_index(summaries, gateway)));

  auto train = ordered_json::parse(io::read_file(paths.train_pairs()));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& entry : train) {
    pairs.emplace_back(entry.at("question").get<std::string>(),
                       entry.at("SQL").get<std::string>());
  }
  io::atomic_write(store.few_shot(),
                   index::to_json(index::build_few_shot_index(pairs, gateway, prompts)));
}

void ensure_stores(const FixturePaths& paths) {
  ensure_fixtures(paths);
  auto marker = paths.root / ".stores_ready";
  if (fs::exists(marker)) return;
  auto cassette = std::make_shared<llm::Cassette>(llm::Cassette::load(
      committed_fixture_dir() / "cassettes" / "california_schools.jsonl",
      llm::CassetteMode::replay));
  llm::Gateway gateway(cassette, nullptr);
  auto prompts = llm::PromptSet::load(prompts_dir());
  build_stores(paths, gateway, prompts);
  io::atomic_write(marker, "ok\n");
}

std::filesystem::path committed_fixture_dir() { return METAFORGE_FIXTURE_DIR; }
std::filesystem::path prompts_dir() { return METAFORGE_PROMPTS_DIR; }
std::filesystem::path build_fixture_root() { return METAFORGE_BUILD_FIXTURE_DIR; }

}  // namespace metaforge::testing
