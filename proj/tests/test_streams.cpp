/*
Copyright (c) 2026 The diskgraph authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <map>
#include <random>

#include "diskgraph/io/merge.hpp"
#include "diskgraph/io/read_stream.hpp"
#include "diskgraph/io/split_stream.hpp"
#include "diskgraph/io/write_stream.hpp"
#include "testutil.hpp"

using namespace dg;
namespace fs = std::filesystem;

namespace {

// Fixed-size 8-byte items: value i at position i.
void write_items(const std::string& path, std::uint64_t count,
                 std::size_t buffer = 4096) {
  WriteStream out(path, buffer);
  std::uint8_t buf[8];
  for (std::uint64_t i = 0; i < count; ++i) {
    put_u64(buf, i);
    out.append(buf, 8);
  }
  out.close();
}

std::uint64_t read_one(ReadStream& in) {
  std::uint8_t buf[8];
  in.read_items(buf, 1);
  return get_u64(buf);
}

// Message-record helpers (8-byte target + 8-byte payload).
std::vector<std::uint8_t> env(std::uint64_t target, std::uint64_t payload) {
  std::vector<std::uint8_t> rec(16);
  put_u64(rec.data(), target);
  put_u64(rec.data() + 8, payload);
  return rec;
}

void write_run(const std::string& path,
               const std::vector<std::pair<std::uint64_t, std::uint64_t>>& recs) {
  WriteStream out(path, 4096);
  for (auto [t, p] : recs) {
    auto r = env(t, p);
    out.append(r.data(), r.size());
  }
  out.close();
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> read_records(
    const std::string& path) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  ReadStream in(path, 16, 4096);
  std::uint8_t buf[16];
  while (!in.at_end()) {
    in.read_items(buf, 1);
    out.emplace_back(get_u64(buf), get_u64(buf + 8));
  }
  return out;
}

CombineFn sum_combiner() {
  return [](std::uint8_t* acc, const std::uint8_t* in) {
    put_u64(acc, get_u64(acc) + get_u64(in));
  };
}

}  // namespace

TEST_CASE("read_items returns items in order and errors past the end") {
  dgtest::TempDir tmp("rs");
  write_items(tmp.sub("s.bin"), 10);

  SUBCASE("full read") {
    ReadStream in(tmp.sub("s.bin"), 8, 64);
    std::vector<std::uint8_t> buf;
    in.read_items(buf, 10);
    for (std::uint64_t i = 0; i < 10; ++i)
      CHECK(get_u64(buf.data() + i * 8) == i);
  }
  SUBCASE("zero-count read leaves the cursor alone") {
    ReadStream in(tmp.sub("s.bin"), 8, 64);
    std::vector<std::uint8_t> buf;
    in.read_items(buf, 0);
    CHECK(in.item_pos() == 0);
    CHECK(read_one(in) == 0);
  }
  SUBCASE("reading beyond the end is a corruption error") {
    dgtest::TempDir tmp2("rs2");
    write_items(tmp2.sub("t.bin"), 3);
    ReadStream in(tmp2.sub("t.bin"), 8, 64);
    std::vector<std::uint8_t> buf;
    CHECK_THROWS_AS(in.read_items(buf, 4), CorruptionError);
  }
}

TEST_CASE("skip stays in the buffer when it can") {
  dgtest::TempDir tmp("skip");
  write_items(tmp.sub("s.bin"), 128);
  // b holds 64 items
  ReadStream in(tmp.sub("s.bin"), 8, 64 * 8);
  for (int i = 0; i < 10; ++i) read_one(in);
  CHECK(in.refill_count() == 1);
  in.skip_items(20);
  CHECK(in.refill_count() == 1);  // still inside the first buffer
  CHECK(read_one(in) == 30);
}

TEST_CASE("skip(0) is the identity") {
  dgtest::TempDir tmp("skip0");
  write_items(tmp.sub("s.bin"), 16);
  ReadStream in(tmp.sub("s.bin"), 8, 64);
  read_one(in);
  auto refills = in.refill_count();
  in.skip_items(0);
  CHECK(in.refill_count() == refills);
  CHECK(read_one(in) == 1);
}

TEST_CASE("skip past the end parks the cursor") {
  dgtest::TempDir tmp("skipend");
  write_items(tmp.sub("s.bin"), 8);
  ReadStream in(tmp.sub("s.bin"), 8, 32);
  in.skip_items(100);
  CHECK(in.at_end());
  std::uint8_t buf[8];
  CHECK_THROWS_AS(in.read_items(buf, 1), CorruptionError);
}

TEST_CASE("skip soundness: read-after-skip(n) equals read-after-n-reads") {
  dgtest::TempDir tmp("skipsnd");
  const std::uint64_t count = 5000;
  write_items(tmp.sub("s.bin"), count);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::uint64_t pos = 0;
    ReadStream skipper(tmp.sub("s.bin"), 8, 256);
    while (pos + 1 < count) {
      std::uint64_t n = rng() % std::min<std::uint64_t>(97, count - pos - 1);
      skipper.skip_items(n);
      pos += n;
      REQUIRE(read_one(skipper) == pos);
      ++pos;
    }
  }
}

TEST_CASE("refill bound: interleaved read/skip never beats a full scan") {
  dgtest::TempDir tmp("refill");
  const std::uint64_t count = 1000000;
  write_items(tmp.sub("s.bin"), count, 1 << 16);
  const std::size_t b = 64 * 1024;
  std::uint64_t full_scan_refills = (count * 8 + b - 1) / b;

  SUBCASE("alternating read(1)/skip(999)") {
    ReadStream in(tmp.sub("s.bin"), 8, b);
    std::uint64_t pos = 0;
    while (pos + 1000 <= count) {
      REQUIRE(read_one(in) == pos);
      in.skip_items(999);
      pos += 1000;
    }
    CHECK(in.refill_count() <= full_scan_refills);
  }
  SUBCASE("random interleavings") {
    std::mt19937_64 rng(123);
    ReadStream in(tmp.sub("s.bin"), 8, b);
    std::uint64_t pos = 0;
    while (pos < count) {
      if (rng() % 2 == 0) {
        std::uint64_t n = std::min<std::uint64_t>(rng() % 300, count - pos);
        in.skip_items(n);
        pos += n;
      } else {
        if (pos == count) break;
        REQUIRE(read_one(in) == pos);
        ++pos;
      }
    }
    CHECK(in.refill_count() <= full_scan_refills);
  }
}

TEST_CASE("write stream flushes only on full buffer or close") {
  dgtest::TempDir tmp("ws");
  {
    WriteStream out(tmp.sub("w.bin"), 64);
    std::uint8_t buf[8] = {0};
    for (int i = 0; i < 7; ++i) out.append(buf, 8);  // 56 bytes < 64
    CHECK(out.flush_count() == 0);
    out.append(buf, 8);  // 64 fits exactly, still buffered
    CHECK(out.flush_count() == 0);
    out.append(buf, 8);  // overflow: one flush
    CHECK(out.flush_count() == 1);
    out.close();
  }
  CHECK(fs::file_size(tmp.sub("w.bin")) == 72);
}

TEST_CASE("splittable stream bounds every closed file") {
  dgtest::TempDir tmp("split");

  SUBCASE("40-byte items with a 100-byte bound: two then one") {
    SplitStream ss(tmp.sub("a"), 100, 64);
    std::uint8_t item[40] = {0};
    ss.append(item, 40);
    ss.append(item, 40);
    ss.append(item, 40);
    CHECK(ss.fully_written() == 1);
    CHECK(fs::file_size(ss.file_path(1)) == 80);  // two items
    ss.finalize();
    CHECK(ss.fully_written() == 2);
    CHECK(fs::file_size(ss.file_path(2)) == 40);  // one item
  }
  SUBCASE("an oversized item sits alone in its file") {
    SplitStream ss(tmp.sub("b"), 100, 64);
    std::uint8_t big[150] = {0};
    ss.append(big, 150);
    ss.finalize();
    CHECK(ss.fully_written() == 1);
    CHECK(fs::file_size(ss.file_path(1)) == 150);
  }
  SUBCASE("zero appends leave nothing") {
    SplitStream ss(tmp.sub("c"), 100, 64);
    CHECK(ss.fully_written() == 0);
    ss.finalize();
    CHECK(ss.fully_written() == 0);
    CHECK(!ss.fetch_next().has_value());
  }
  SUBCASE("finalize after one append publishes one file") {
    SplitStream ss(tmp.sub("d"), 100, 64);
    std::uint8_t item[8] = {0};
    ss.append(item, 8);
    CHECK(ss.fully_written() == 0);
    ss.finalize();
    CHECK(ss.fully_written() == 1);
  }
  SUBCASE("every closed file obeys the size bound") {
    std::mt19937_64 rng(17);
    SplitStream ss(tmp.sub("e"), 256, 64);
    for (int i = 0; i < 500; ++i) {
      std::size_t n = 1 + rng() % 300;  // some items exceed the bound
      std::vector<std::uint8_t> item(n, 0xab);
      ss.append(item.data(), n);
    }
    ss.finalize();
    for (std::uint64_t f = 1; f <= ss.fully_written(); ++f) {
      auto size = fs::file_size(ss.file_path(f));
      // either within bound or a single oversized item
      CHECK((size <= 256 || size <= 300));
    }
  }
}

TEST_CASE("splittable stream fetch hands out files in order exactly once") {
  dgtest::TempDir tmp("fetch");
  SplitStream ss(tmp.sub("s"), 64, 32);
  std::uint8_t item[16];
  std::multiset<std::uint64_t> appended;
  for (std::uint64_t i = 0; i < 50; ++i) {
    put_u64(item, i);
    put_u64(item + 8, i * 7);
    ss.append(item, 16);
    appended.insert(i);
  }
  ss.finalize();

  SUBCASE("counters behave like the documented scenario") {
    // consume two files: no_s=2, fully-written >= 4
    REQUIRE(ss.fully_written() >= 4);
    ss.fetch_next();
    ss.fetch_next();
    CHECK(ss.consumed() == 2);
    auto third = ss.fetch_next();
    REQUIRE(third.has_value());
    CHECK(*third == ss.file_path(3));
    CHECK(ss.consumed() == 3);
  }
  SUBCASE("fetch-all returns every appended item exactly once") {
    std::multiset<std::uint64_t> got;
    while (auto f = ss.fetch_next()) {
      for (auto [t, p] : read_records(*f)) got.insert(t);
      fs::remove(*f);
    }
    CHECK(got == appended);
    CHECK(!ss.fetch_next().has_value());
  }
}

TEST_CASE("kway merge: folded duplicates, identity copy, sorted-input check") {
  dgtest::TempDir tmp("merge");
  MergeOptions opt;
  opt.payload_size = 8;
  opt.fanin = 4;
  opt.buffer_bytes = 64;
  opt.temp_dir = tmp.str();

  SUBCASE("grouping with a sum combiner") {
    write_run(tmp.sub("r1"), {{1, 10}});
    write_run(tmp.sub("r2"), {{1, 32}});
    write_run(tmp.sub("r3"), {{2, 5}});
    opt.combiner = sum_combiner();
    kway_merge({tmp.sub("r1"), tmp.sub("r2"), tmp.sub("r3")}, tmp.sub("out"),
               opt);
    auto out = read_records(tmp.sub("out"));
    REQUIRE(out.size() == 2);
    CHECK(out[0] == std::pair<std::uint64_t, std::uint64_t>{1, 42});
    CHECK(out[1] == std::pair<std::uint64_t, std::uint64_t>{2, 5});
  }
  SUBCASE("single run without combiner copies byte-identically") {
    write_run(tmp.sub("one"), {{3, 1}, {5, 2}, {5, 9}, {9, 4}});
    std::ifstream src(tmp.sub("one"), std::ios::binary);
    std::string before((std::istreambuf_iterator<char>(src)), {});
    opt.delete_inputs = false;
    kway_merge({tmp.sub("one")}, tmp.sub("copy"), opt);
    std::ifstream dst(tmp.sub("copy"), std::ios::binary);
    std::string after((std::istreambuf_iterator<char>(dst)), {});
    CHECK(before == after);
  }
  SUBCASE("unsorted run raises a precondition violation") {
    write_run(tmp.sub("bad"), {{5, 1}, {3, 2}});
    CHECK_THROWS_AS(kway_merge({tmp.sub("bad")}, tmp.sub("out"), opt),
                    ProtocolError);
  }
  SUBCASE("without a combiner, equal targets stay in run order") {
    write_run(tmp.sub("a"), {{5, 100}});
    write_run(tmp.sub("b"), {{2, 7}, {5, 200}});
    kway_merge({tmp.sub("a"), tmp.sub("b")}, tmp.sub("out"), opt);
    auto out = read_records(tmp.sub("out"));
    REQUIRE(out.size() == 3);
    CHECK(out[0].first == 2);
    CHECK(out[1] == std::pair<std::uint64_t, std::uint64_t>{5, 100});
    CHECK(out[2] == std::pair<std::uint64_t, std::uint64_t>{5, 200});
  }
}

TEST_CASE("kway merge matches an in-memory sort+group oracle and pass bound") {
  dgtest::TempDir tmp("mergebig");
  std::mt19937_64 rng(31);

  const std::size_t num_runs = 150;  // fanin 8 -> ceil(log8(150)) = 3 passes
  std::vector<std::string> runs;
  std::map<std::uint64_t, std::uint64_t> oracle;
  for (std::size_t r = 0; r < num_runs; ++r) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> recs;
    std::size_t n = rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t target = rng() % 128;
      std::uint64_t payload = rng() % 1000;
      recs.emplace_back(target, payload);
      oracle[target] += payload;
    }
    std::sort(recs.begin(), recs.end());
    std::string path = tmp.sub("run" + std::to_string(r));
    write_run(path, recs);
    runs.push_back(path);
  }

  MergeOptions opt;
  opt.payload_size = 8;
  opt.fanin = 8;
  opt.buffer_bytes = 64;
  opt.temp_dir = tmp.str();
  opt.combiner = sum_combiner();
  MergeStats stats = kway_merge(runs, tmp.sub("out"), opt);

  CHECK(stats.passes == 3);
  CHECK(stats.max_fanin <= 8);
  auto out = read_records(tmp.sub("out"));
  std::map<std::uint64_t, std::uint64_t> got(out.begin(), out.end());
  CHECK(out.size() == oracle.size());  // each target exactly once
  CHECK(got == oracle);
  // sorted output
  for (std::size_t i = 1; i < out.size(); ++i)
    CHECK(out[i - 1].first < out[i].first);
}

TEST_CASE("merge equivalence property on random multisets without combiner") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    dgtest::TempDir tmp("mergeprop");
    std::vector<std::string> runs;
    std::multiset<std::pair<std::uint64_t, std::uint64_t>> expected;
    std::size_t num_runs = 1 + rng() % 12;
    for (std::size_t r = 0; r < num_runs; ++r) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> recs;
      std::size_t n = rng() % 30;
      for (std::size_t i = 0; i < n; ++i) {
        recs.emplace_back(rng() % 20, rng() % 50);
        expected.insert(recs.back());
      }
      std::sort(recs.begin(), recs.end());
      std::string path = tmp.sub("r" + std::to_string(r));
      write_run(path, recs);
      runs.push_back(path);
    }
    MergeOptions opt;
    opt.payload_size = 8;
    opt.fanin = 4;
    opt.buffer_bytes = 64;
    opt.temp_dir = tmp.str();
    kway_merge(runs, tmp.sub("out"), opt);
    auto out = read_records(tmp.sub("out"));
    std::multiset<std::pair<std::uint64_t, std::uint64_t>> got(out.begin(),
                                                               out.end());
    CHECK(got == expected);
    for (std::size_t i = 1; i < out.size(); ++i)
      CHECK(out[i - 1].first <= out[i].first);
  }
}

TEST_CASE("stream round-trip reproduces any item sequence") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    dgtest::TempDir tmp("rt");
    std::size_t n = rng() % 500;
    std::vector<std::uint64_t> items(n);
    for (auto& x : items) x = rng();
    {
      WriteStream out(tmp.sub("x.bin"), 128);
      std::uint8_t buf[8];
      for (auto x : items) {
        put_u64(buf, x);
        out.append(buf, 8);
      }
      out.close();
    }
    ReadStream in(tmp.sub("x.bin"), 8, 128);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(read_one(in) == items[i]);
    CHECK(in.at_end());
  }
}
