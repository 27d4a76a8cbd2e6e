#include "sbmcv/records.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace sbmcv;

namespace {

ReplicateRecord sample_record() {
  ReplicateRecord r;
  r.cell = CellId{60, 3, SizeScheme::PowerLaw, 0.05, 4};
  r.method = "latin:10";
  r.replicate = 17;
  r.seed = 0xfedcba9876543210ULL;
  r.k_hat = 2;
  r.mse_true = 1.0 / 3.0;
  r.curve = {{1, 0.1}, {2, 0.0625}, {3, 1e-300}};
  r.wall_ms = 12.5;
  r.network_hash = 0x00ab;
  return r;
}

}  // namespace

TEST(Records, Columns) {
  std::ostringstream out;
  write_record_header(out);
  EXPECT_EQ(out.str(), "n,sizes,b,r,method,replicate,seed,K_true,K_hat,mse_true,curve,wall_ms,status,network_hash\n");
  EXPECT_EQ(record_columns().size(), 14u);
}

TEST(Records, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 0.05, 123456.789, 0.0}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(0.05), "0.05");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(Records, CurveText) {
  const std::vector<std::pair<int, double>> curve{{1, 0.5}, {2, 0.25}};
  EXPECT_EQ(format_curve(curve), "1:0.5;2:0.25;");
  EXPECT_EQ(parse_curve("1:0.5;2:0.25;"), curve);
  EXPECT_TRUE(parse_curve("").empty());
  EXPECT_THROW(parse_curve("1-0.5;"), std::runtime_error);
}

TEST(Records, LineRoundTrip) {
  const ReplicateRecord r = sample_record();
  const std::string line = record_line(r);
  const ReplicateRecord back = parse_record(line);
  EXPECT_EQ(back.cell, r.cell);
  EXPECT_EQ(back.method, r.method);
  EXPECT_EQ(back.replicate, r.replicate);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.k_hat, r.k_hat);
  EXPECT_EQ(back.mse_true, r.mse_true);
  EXPECT_EQ(back.curve, r.curve);
  EXPECT_EQ(back.wall_ms, r.wall_ms);
  EXPECT_EQ(back.status, "ok");
  EXPECT_EQ(back.network_hash, r.network_hash);
  EXPECT_NE(line.find(",00000000000000ab"), std::string::npos);
}

TEST(Records, TimingCanBeDropped) {
  ReplicateRecord a = sample_record(), b = sample_record();
  b.wall_ms = 999;
  EXPECT_NE(record_line(a), record_line(b));
  EXPECT_EQ(record_line(a, false), record_line(b, false));
}

TEST(Records, FailedStatusIsSanitized) {
  ReplicateRecord r = sample_record();
  r.status = "failed: bad, worse\nworst";
  const ReplicateRecord back = parse_record(record_line(r));
  EXPECT_FALSE(back.ok());
  EXPECT_EQ(back.status, "failed: bad  worse worst");
}

TEST(Records, StreamRoundTrip) {
  std::stringstream io;
  write_record_header(io);
  write_record(io, sample_record());
  ReplicateRecord second = sample_record();
  second.method = "aic";
  second.curve.clear();
  write_record(io, second);
  const auto records = read_records(io);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[1].method, "aic");
  EXPECT_TRUE(records[1].curve.empty());
}

TEST(Records, MalformedInputThrows) {
  std::istringstream no_header("60,equal,0.1,5,aic,0,1,2,2,0,,1,ok,0\n");
  EXPECT_THROW(read_records(no_header), std::runtime_error);
  EXPECT_THROW(parse_record("1,2,3"), std::runtime_error);
  EXPECT_THROW(read_records_file("/nonexistent/records.csv"), std::runtime_error);
}

TEST(Records, CellKeyAndNetworkHash) {
  const CellId a{30, 2, SizeScheme::Equal, 0.1, 5};
  CellId b = a;
  b.r = 4;
  EXPECT_NE(a.key(), b.key());
  EXPECT_EQ(a.key(), "n=30,K=2,sizes=equal,b=0.1,r=5");
  Adjacency x = Adjacency::empty(4), y = Adjacency::empty(4);
  EXPECT_EQ(network_hash(x), network_hash(y));
  y.set(1, 2, true);
  EXPECT_NE(network_hash(x), network_hash(y));
  EXPECT_NE(network_hash(Adjacency::empty(4)), network_hash(Adjacency::empty(5)));
}
