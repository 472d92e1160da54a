#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"

#include "crowdsense/errors.hpp"
#include "crowdsense/io.hpp"

using namespace crowdsense;

TEST_CASE("CSV round trip is bit exact") {
  Rng rng(1);
  Matrix m = crowdsense::testing::random_matrix(rng, 13, 7, 1e3);
  m(0, 0) = 0.1;
  m(1, 1) = -0.0;
  m(2, 2) = 5e-324;
  m(3, 3) = 1.7976931348623157e308;
  std::stringstream ss;
  write_matrix_csv(ss, m);
  const auto back = read_matrix_csv(ss);
  CHECK(crowdsense::testing::bit_identical(back.values, m));
  CHECK(back.observed.is_full());
}

TEST_CASE("CSV empty cells are unobserved") {
  std::stringstream ss("c0,c1,c2\n1,,3\n,5,\n");
  const auto m = read_matrix_csv(ss, true);
  CHECK(m.values.rows() == 2);
  CHECK(m.values.cols() == 3);
  CHECK(m.observed.observed_count() == 3);
  CHECK_FALSE(m.observed.contains(0, 1));
  CHECK(m.values(1, 1) == 5.0);

  std::stringstream out;
  write_matrix_csv(out, m.values, m.observed, true);
  CHECK(out.str() == "c0,c1,c2\n1,,3\n,5,\n");
}

TEST_CASE("CSV errors") {
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(ragged), ValidationError);
  std::stringstream junk("1,abc\n");
  CHECK_THROWS_AS(read_matrix_csv(junk), ValidationError);
  std::stringstream nan("1,nan\n");
  CHECK_THROWS_AS(read_matrix_csv(nan), ValidationError);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_matrix_csv(empty), ValidationError);
  CHECK_THROWS_AS(read_matrix_csv(std::filesystem::path("/nonexistent/x.csv")), ValidationError);
}

TEST_CASE("mask CSV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "crowdsense_io_test";
  std::filesystem::create_directories(dir);
  Mask m(3, 4);
  m.insert(0, 1);
  m.insert(2, 3);
  write_mask_csv(dir / "mask.csv", m);
  CHECK(read_mask_csv(dir / "mask.csv") == m);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "0,2\n";
  }
  CHECK_THROWS_AS(read_mask_csv(dir / "bad.csv"), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("edge list parsing") {
  std::stringstream ss("# ring\n0 1\n1 2  # trailing\n\n2 0\n");
  const auto t = parse_edge_list(ss);
  CHECK(t.agent_count() == 3);
  CHECK(t.edges().size() == 3);

  std::stringstream bad("0 1 2\n");
  CHECK_THROWS_AS(parse_edge_list(bad), ValidationError);
  std::stringstream neg("0 -1\n");
  CHECK_THROWS_AS(parse_edge_list(neg), ValidationError);
  std::stringstream words("a b\n");
  CHECK_THROWS_AS(parse_edge_list(words), ValidationError);

  std::stringstream out;
  write_edge_list(out, Topology::ring(4));
  CHECK(parse_edge_list(out).edges() == Topology::ring(4).edges());
}

TEST_CASE("report round trip is lossless") {
  Rng rng(9);
  RunReport r;
  r.command = "rpca";
  r.seed = 18446744073709551615ULL;
  r.parameters = {{"lambda", "0.07071067811865475"}, {"input", "data/"}};
  r.metrics = {{"relative_error", rng.uniform01() * 1e-7}, {"iterations", 37.0},
               {"wall_time_ms", 12.345678901234567}};
  r.converged = false;
  r.histories["residual"] = {1.0, 0.1, 1.0 / 3.0, 5e-324};
  const auto back = report_from_json(to_json(r));
  CHECK(back == r);
  CHECK(back.library_version == library_version());

  CHECK_THROWS_AS(report_from_json("{\"command\":\"x\",\"seed\":1}"), ValidationError);
  CHECK_THROWS_AS(report_from_json("not json"), ValidationError);
  r.metrics["bad"] = INFINITY;
  CHECK_THROWS_AS(to_json(r), ValidationError);
}

TEST_CASE("format_double is shortest round trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(parse_double(" +2.5 ") == 2.5);
  CHECK_THROWS_AS(parse_double("2.5x"), ValidationError);
}
