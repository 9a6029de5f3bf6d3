#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gebridge/io.hpp"

using namespace gebridge;

namespace {

std::vector<BinaryTrace> random_traces(std::mt19937_64& gen) {
  std::uniform_int_distribution<std::size_t> count(1, 6), len(1, 70);
  std::bernoulli_distribution coin(0.4);
  std::vector<BinaryTrace> out(count(gen));
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r].rep = r;
    out[r].bits.resize(len(gen));
    for (auto& b : out[r].bits) b = coin(gen) ? 1 : 0;
  }
  return out;
}

}  // namespace

TEST_CASE("trace round trips") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto traces = random_traces(gen);
    std::stringstream text, bin;
    io::write_traces_text(text, traces);
    io::write_traces_binary(bin, traces);
    const auto a = io::read_traces_text(text);
    const auto b = io::read_traces_binary(bin);
    REQUIRE(a.size() == traces.size());
    REQUIRE(b.size() == traces.size());
    for (std::size_t r = 0; r < traces.size(); ++r) {
      CHECK(a[r].bits == traces[r].bits);
      CHECK(b[r].bits == traces[r].bits);
      CHECK(b[r].rep == r);
    }
  }
}

TEST_CASE("binary layout") {
  BinaryTrace t;
  t.bits = {1, 0, 0, 0, 0, 0, 0, 1, 1, 1};
  std::ostringstream out;
  io::write_trace_binary(out, t);
  const std::string s = out.str();
  REQUIRE(s.size() == 10);
  CHECK(s.substr(0, 4) == "GEB1");
  CHECK(s[4] == 10);
  CHECK(s[5] == 0);
  CHECK(s[6] == 0);
  CHECK(s[7] == 0);
  CHECK(static_cast<unsigned char>(s[8]) == 0x81);
  CHECK(static_cast<unsigned char>(s[9]) == 0x03);
}

TEST_CASE("malformed traces") {
  std::istringstream bad_text("0101\n01x1\n");
  CHECK_THROWS_AS(io::read_traces_text(bad_text), io::FormatError);
  std::istringstream bad_magic(std::string("GEB2\x01\0\0\0\x01", 9));
  CHECK_THROWS_AS(io::read_traces_binary(bad_magic), io::FormatError);
  std::istringstream short_payload(std::string("GEB1\x10\0\0\0\x01", 9));
  CHECK_THROWS_AS(io::read_traces_binary(short_payload), io::FormatError);
  std::istringstream short_header(std::string("GEB1\x10", 5));
  CHECK_THROWS_AS(io::read_traces_binary(short_header), io::FormatError);
  std::istringstream empty("");
  CHECK(io::read_traces_binary(empty).empty());
}

TEST_CASE("key=value parsing") {
  std::istringstream in("# comment\n kernel = exp \n\ntc=8\ntc = 10\ns=0.5 # not a comment\n");
  const auto kv = io::parse_key_value(in);
  CHECK(kv.at("kernel") == "exp");
  CHECK(kv.at("tc") == "10");
  CHECK(kv.at("s") == "0.5 # not a comment");
  std::istringstream bad("just words\n");
  CHECK_THROWS_AS(io::parse_key_value(bad), io::FormatError);
  std::istringstream nokey("=3\n");
  CHECK_THROWS_AS(io::parse_key_value(nokey), io::FormatError);
  CHECK_THROWS_AS(io::load_key_value_file("/nonexistent/file.conf"), io::FormatError);
}

TEST_CASE("numbers and CSV") {
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(3.0) == "3");
  CHECK(io::format_number(std::nan("")) == "nan");
  const double x = 0.38008390978757189942;
  CHECK(std::stod(io::format_number(x)) == x);
  std::ostringstream out;
  io::write_csv_line(out, {"a", "b", "c"});
  CHECK(out.str() == "a,b,c\n");
  const auto header = io::report_csv_header();
  const std::vector<std::string> lead(header.begin(), header.begin() + 7);
  CHECK(lead == std::vector<std::string>{"tc_over_d", "s_over_sigma", "kernel", "max_gap", "dtv_ge", "dtv_second",
                                         "err_pct"});
  CHECK(io::ge_params_csv_header().size() == io::ge_params_csv_row(GeParams{}).size());
}

TEST_CASE("json records") {
  const KernelSpec k{KernelFamily::Exponential, 2.0, 8.0};
  const auto back = io::kernel_from_json(io::to_json(k));
  CHECK(back.family == k.family);
  CHECK(back.sigma2 == k.sigma2);
  CHECK(back.t_c == k.t_c);
  CHECK_THROWS_AS(io::kernel_from_json(nlohmann::json{{"family", "exp"}, {"t_c", -1.0}}), DomainError);

  SimPlan plan{{KernelFamily::SquaredExponential, 1.0, 3.0}, {1.0, 0.0}};
  plan.n_reps = 20;
  plan.n_slots = 400;
  const auto r = build_report(plan);
  const auto j = io::to_json(r);
  CHECK(j.at("kernel").at("family") == "sqexp");
  CHECK(j.at("gaps_empirical").at("gap").size() == 4);
  CHECK(j.at("policies").at("transition_aggregation") == "pooled");
  CHECK(io::report_csv_row(r).size() == io::report_csv_header().size());
}
