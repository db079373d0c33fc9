#include "oracles.hpp"
#include "secmacc/placement.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace secmacc;

namespace {

std::vector<std::string> labels(const Cache& c, bool keys) {
  std::vector<std::string> out;
  for (const auto& it : c.items)
    if (it.is_key() == keys) out.push_back(it.label());
  return out;
}

Placement make(const RawParams& raw, std::uint64_t seed = 5) {
  const auto p = validate_params(raw);
  return place(p, generate_library(p, seed), seed);
}

}  // namespace

TEST(Placement, GroupedMatchesPublishedTable) {
  // (K=6, L=2, i=2): cache k holds W_{n, <k>_3} for every n plus these sub-keys
  const auto pl = make({6, 2, 6, 2, 18, MemoryPoint::Uncoded});
  const std::vector<std::vector<std::string>> subkeys = {
      {"K2^3", "K1^1"}, {"K1^2", "K1^3"}, {"K1^1", "K1^2"}, {"K1^3", "K2^1"}, {"K2^2", "K2^3"}, {"K2^1", "K2^2"},
  };
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto& c = pl.caches[k - 1];
    std::vector<std::string> data;
    for (std::size_t n = 1; n <= 6; ++n) data.push_back("W" + std::to_string(n) + "." + std::to_string((k - 1) % 3 + 1));
    EXPECT_EQ(labels(c, false), data) << "cache " << k;
    EXPECT_EQ(labels(c, true), subkeys[k - 1]) << "cache " << k;
  }
}

TEST(Placement, CoprimeThreeUsers) {
  // (K=3, L=2, i=1): cache k holds W_{n,k}; one key split in two, AIR(3,2)-coded
  const auto pl = make({3, 2, 3, 1, 6, MemoryPoint::Uncoded});
  ASSERT_EQ(pl.keys.size(), 1u);
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto& c = pl.caches[k - 1];
    EXPECT_EQ(labels(c, true), std::vector<std::string>{"KC1." + std::to_string(k)});
    EXPECT_EQ(c.key_bits(), 1u);
    EXPECT_EQ(c.data_bits(), 3u * 2u);
  }
  // shares: row k of [[1,0],[0,1],[1,1]] applied to (K1^1, K1^2)
  const auto& key = pl.keys.keys()[0].bits;
  const auto a = key.slice(0, 1), b = key.slice(1, 1);
  EXPECT_EQ(pl.caches[0].items.back().bits, a);
  EXPECT_EQ(pl.caches[1].items.back().bits, b);
  EXPECT_EQ(pl.caches[2].items.back().bits, a ^ b);
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto got = recover_keys(pl, k);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got.at(1), key);
  }
}

TEST(Placement, FullKeyStoresOneKeyPerCache) {
  const auto p = validate_params({2, 1, 2, std::nullopt, 4, MemoryPoint::FullKey});
  const auto [caches, keys] = place_full_keys(p, 9);
  ASSERT_EQ(caches.size(), 2u);
  EXPECT_EQ(caches[0].bit_count(), 4u);
  EXPECT_EQ(caches[1].bit_count(), 4u);
  EXPECT_NE(keys.keys()[0].bits, keys.keys()[1].bits);
  EXPECT_EQ(caches[1].items[0].label(), "K2");
}

TEST(Placement, BitAccountingEqualsMemoryTimesF) {
  for (std::size_t K = 2; K <= 9; ++K)
    for (std::size_t L = 1; L < K; ++L) {
      std::vector<RawParams> raws = {{K, L, K + 1, std::nullopt, std::nullopt, MemoryPoint::FullKey},
                                     {K, L, K + 1, std::nullopt, std::nullopt, MemoryPoint::Coded}};
      for (std::size_t i = 1; i * L <= K; ++i) raws.push_back({K, L, K + 1, i, std::nullopt, MemoryPoint::Uncoded});
      for (const auto& raw : raws) {
        const auto pl = make(raw);
        const auto& p = pl.params;
        oracle::Memory want;
        if (raw.point == MemoryPoint::FullKey) want = oracle::full_key_memory();
        else if (raw.point == MemoryPoint::Coded) want = oracle::coded_memory(static_cast<std::int64_t>(L), static_cast<std::int64_t>(K + 1));
        else want = oracle::uncoded_memory(static_cast<std::int64_t>(K), static_cast<std::int64_t>(L),
                                           static_cast<std::int64_t>(K + 1), static_cast<std::int64_t>(*raw.i));
        const oracle::Q F(static_cast<std::int64_t>(p.F()));
        for (const auto& c : pl.caches) {
          ASSERT_EQ(oracle::Q(static_cast<std::int64_t>(c.bit_count())), want.M * F) << p.describe();
          ASSERT_EQ(oracle::Q(static_cast<std::int64_t>(c.data_bits())), want.M_D * F) << p.describe();
          ASSERT_EQ(oracle::Q(static_cast<std::int64_t>(c.key_bits())), want.M_K * F) << p.describe();
        }
      }
    }
}

TEST(Placement, GroupedSubKeyCoverageBySlotScan) {
  // Every user in group j sees all L+1 sub-keys of each key of group j among
  // the 2L sub-key slots of its caches.
  for (std::size_t K = 4; K <= 12; ++K)
    for (std::size_t L = 1; L < K; ++L)
      for (std::size_t i = 2; i * L <= K; ++i) {
        const auto p = validate_params({K, L, K, i, std::nullopt, MemoryPoint::Uncoded});
        if (p.scheme() != SchemeCase::Grouped) continue;
        const auto pl = place(p, generate_library(p, 1), 1);
        for (std::size_t k = 1; k <= K; ++k) {
          const std::size_t group = (k - 1) / p.Ktilde() + 1;
          std::map<std::uint32_t, std::set<std::size_t>> seen;
          std::size_t slots = 0;
          for (std::size_t t = 0; t < L; ++t)
            for (const auto& it : pl.caches[(k - 1 + t) % K].items)
              if (it.kind == ItemKind::SubKey) {
                seen[it.key_id].insert(it.index);
                ++slots;
              }
          EXPECT_EQ(slots, 2 * L * p.table_rows() * p.table_rows());
          for (const auto& key : pl.keys.keys())
            if (key.group == group) {
              EXPECT_EQ(seen[key.id].size(), L + 1) << p.describe() << " user " << k;
            }
          const auto got = recover_keys(pl, k);
          for (const auto& key : pl.keys.keys())
            if (key.group == group) {
              EXPECT_EQ(got.at(key.id), key.bits);
            }
        }
      }
}

TEST(Placement, UncodedDataWindows) {
  const auto p = validate_params({7, 2, 7, 3, std::nullopt, MemoryPoint::Uncoded});
  // cache k holds <(k-1)i+1>..<ki> of 7 subfiles
  EXPECT_EQ(cached_subfile_indices(p, 1), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(cached_subfile_indices(p, 3), (std::vector<std::size_t>{7, 1, 2}));
  // user k sees iL consecutive subfile indices
  const auto pl = place(p, generate_library(p, 1), 1);
  for (std::size_t k = 1; k <= 7; ++k) {
    std::set<std::size_t> idx;
    for (const auto& [fs, bits] : recover_subfiles(pl, k)) idx.insert(fs.second);
    EXPECT_EQ(idx.size(), 6u);
  }
}

TEST(Placement, CodedFiveUsersThreeCaches) {
  const auto p = validate_params({5, 3, 5, std::nullopt, 9, MemoryPoint::Coded});
  const auto lib = generate_library(p, 3);
  const auto pl = place(p, lib, 3);
  EXPECT_EQ(pl.keys.size(), 0u);
  for (const auto& c : pl.caches) {
    EXPECT_EQ(c.items.size(), 5u);
    EXPECT_EQ(c.bit_count(), 15u);
  }
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_EQ(recover_all_files_coded(pl, k), lib.files());
}

TEST(Placement, RejectsWrongCaseAndKeys) {
  const auto coded = validate_params({5, 3, 5, std::nullopt, 9, MemoryPoint::Coded});
  EXPECT_THROW(place_keys_coprime(coded, KeySet{}), Error);
  const auto p = validate_params({3, 2, 3, 1, 6, MemoryPoint::Uncoded});
  try {
    place(p, generate_library(p, 1), KeySet{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::KeyExhausted);
  }
}

TEST(Placement, ManifestFormat) {
  const auto pl = make({3, 2, 3, 1, 6, MemoryPoint::Uncoded});
  std::ostringstream os;
  write_manifest(os, pl);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "cache_id,item_kind,item_id,bit_length,offset");
  std::getline(in, line);
  EXPECT_EQ(line, "1,subfile,W1.1,2,0");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
  }
  EXPECT_EQ(rows + 1, 12u);
}

TEST(Placement, KeysAreDeterministic) {
  const auto p = validate_params({6, 2, 6, 2, 18, MemoryPoint::Uncoded});
  const auto a = generate_keys(p, 4), b = generate_keys(p, 4), c = generate_keys(p, 5);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a.keys()[1].bits, b.keys()[1].bits);
  EXPECT_NE(a.keys()[1].bits, c.keys()[1].bits);
  EXPECT_EQ(a.keys()[0].group, 1u);
  EXPECT_EQ(a.keys()[1].group, 2u);
  EXPECT_EQ(a.total_bits(), 12u);
}
