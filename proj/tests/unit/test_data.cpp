#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "support.hpp"
#include "tidagcn/data/dataset.hpp"
#include "tidagcn/data/keyvalue.hpp"
#include "tidagcn/data/synthetic.hpp"
#include "tidagcn/numeric/errors.hpp"

using namespace tidagcn;

namespace {

Dataset parse_string(const std::string& s) {
  std::istringstream in(s);
  return parse_tsv(in);
}

std::string write_string(const Dataset& ds) {
  std::ostringstream out;
  write_tsv(ds, out);
  return out.str();
}

std::string fixture(const std::string& name) { return std::string(TIDAGCN_FIXTURE_DIR) + "/" + name; }

// Independent normalization: data lines stably sorted by (account, domain,
// timestamp) and re-emitted with LF endings.
std::string normalize(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::vector<std::tuple<std::uint64_t, char, std::int64_t, std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream f(line);
    std::uint64_t a, item;
    char d;
    std::int64_t t;
    f >> a >> d >> item >> t;
    rows.emplace_back(a, d, t, std::to_string(a) + '\t' + d + '\t' + std::to_string(item) + '\t' +
                                   std::to_string(t) + '\n');
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x), std::get<2>(x)) <
           std::tie(std::get<0>(y), std::get<1>(y), std::get<2>(y));
  });
  std::string out;
  for (const auto& r : rows) out += std::get<3>(r);
  return out;
}

std::string error_of(const std::string& text) {
  try {
    parse_string(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

Dataset numbered(std::size_t n_seq) {
  Dataset ds;
  ds.item_ids[0] = {0};
  ds.item_ids[1] = {0};
  for (std::size_t s = 0; s < n_seq; ++s) {
    ds.account_ids.push_back(s / 2);
    ds.sequences.push_back({s / 2, s % 2 == 0 ? Domain::A : Domain::B, {{0, 1}, {0, 2}}});
  }
  ds.account_ids.erase(std::unique(ds.account_ids.begin(), ds.account_ids.end()),
                       ds.account_ids.end());
  return ds;
}

double mutual_information(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y,
                          std::size_t k) {
  std::vector<double> pxy(k * k, 0.0), px(k, 0.0), py(k, 0.0);
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    pxy[x[i] * k + y[i]] += 1 / n;
    px[x[i]] += 1 / n;
    py[y[i]] += 1 / n;
  }
  double mi = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (pxy[a * k + b] > 0) mi += pxy[a * k + b] * std::log(pxy[a * k + b] / (px[a] * py[b]));
    }
  }
  return mi;
}

}  // namespace

TEST_SUITE("data-io") {
  TEST_CASE("parse: two events of one domain-A sequence") {
    const Dataset ds = parse_string("0\tA\t0\t100\n0\tA\t1\t200\n");
    REQUIRE(ds.sequences.size() == 1);
    CHECK(ds.n_accounts() == 1);
    const auto& s = ds.sequences[0];
    CHECK(s.account == 0);
    CHECK(s.domain == Domain::A);
    REQUIRE(s.events.size() == 2);
    CHECK(s.events[0].item == 0);
    CHECK(s.events[0].timestamp == 100);
    CHECK(s.events[1].item == 1);
    CHECK(s.events[1].timestamp == 200);
    CHECK(ds.unsorted_sequences == 0);
  }

  TEST_CASE("parse: empty input and comment-only input") {
    CHECK(parse_string("").sequences.empty());
    const Dataset ds = parse_string("# nothing\n\n   \n");
    CHECK(ds.sequences.empty());
    CHECK(ds.n_accounts() == 0);
  }

  TEST_CASE("parse: ids become dense in raw-id order") {
    const Dataset ds = parse_string("90\tB\t7\t1\n5\tA\t300\t2\n5\tA\t12\t3\n90\tA\t12\t4\n");
    CHECK(ds.account_ids == std::vector<std::uint64_t>{5, 90});
    CHECK(ds.item_ids[0] == std::vector<std::uint64_t>{12, 300});
    CHECK(ds.item_ids[1] == std::vector<std::uint64_t>{7});
    REQUIRE(ds.sequences.size() == 3);
    CHECK(ds.sequences[0].account == 0);
    CHECK(ds.sequences[0].events[0].item == 1);
    CHECK(ds.sequences[2].domain == Domain::B);
    CHECK(ds.find(1, Domain::B) == 2);
    CHECK(ds.find(0, Domain::B) == Dataset::npos);
  }

  TEST_CASE("parse: malformed lines name line and column") {
    // A blank line counts; the bad row is on line 3.
    CHECK(error_of("0\tA\t0\t1\n\n0\tC\t0\t2\n").rfind("line 3, column 3:", 0) == 0);
    CHECK(error_of("0\tA\t0\n").rfind("line 1, column 6:", 0) == 0);
    CHECK(error_of("0\tA\tx1\t5\n").rfind("line 1, column 5:", 0) == 0);
    CHECK(error_of("0\tA\t1\t5\t9\n").rfind("line 1, column 8:", 0) == 0);
    CHECK(error_of("0 A 1 5\n").rfind("line 1, column", 0) == 0);
    CHECK(error_of("-1\tA\t1\t5\n").rfind("line 1, column 1:", 0) == 0);
    CHECK(error_of("1\tA\t1\t\n").rfind("line 1, column 7:", 0) == 0);
    CHECK(error_of("1\tA\t1\t99999999999999999999\n").find("out of range") != std::string::npos);
    CHECK_THROWS_AS(parse_tsv_file(fixture("does-not-exist.tsv")), DataError);
  }

  TEST_CASE("parse: out-of-order groups are sorted stably and counted") {
    const Dataset ds = parse_string("1\tA\t5\t300\n1\tA\t6\t100\n1\tA\t7\t100\n2\tB\t1\t1\n");
    CHECK(ds.unsorted_sequences == 1);
    const auto& e = ds.sequences[0].events;
    CHECK(e[0].timestamp == 100);
    CHECK(ds.item_ids[0][e[0].item] == 6);
    CHECK(ds.item_ids[0][e[1].item] == 7);
    CHECK(ds.item_ids[0][e[2].item] == 5);
  }

  TEST_CASE("round trip on the 50-event fixture") {
    const Dataset ds = parse_tsv_file(fixture("events50.tsv"));
    CHECK(ds.n_events() == 50);
    CHECK(ds.unsorted_sequences > 0);
    const std::string written = write_string(ds);
    CHECK(written == normalize(fixture("events50.tsv")));
    // Writing the parsed form again is a fixed point.
    CHECK(write_string(parse_string(written)) == written);
  }

  TEST_CASE("split: 85 / 15, deterministic, a partition") {
    const Dataset ds = numbered(100);
    const Dataset a = split(ds, 0.85, 7);
    const Dataset b = split(ds, 0.85, 7);
    CHECK(a.train_indices().size() == 85);
    CHECK(a.test_indices().size() == 15);
    CHECK(a.split == b.split);
    CHECK(split(ds, 0.85, 8).split != a.split);
    std::set<std::size_t> all;
    for (std::size_t i : a.train_indices()) all.insert(i);
    for (std::size_t i : a.test_indices()) CHECK(all.insert(i).second);
    CHECK(all.size() == 100);
    CHECK_THROWS_AS(split(ds, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split(ds, 1.0, 1), ConfigError);
    // Test fraction within one sequence of 15% for other sizes.
    for (std::size_t n : {7, 20, 33, 101}) {
      const Dataset s = split(numbered(n), 0.85, 3);
      CHECK(std::abs(static_cast<double>(s.test_indices().size()) - 0.15 * n) <= 1.0);
    }
    const Dataset unsplit = numbered(4);
    CHECK(unsplit.train_indices().size() == 4);
    CHECK(unsplit.test_indices().empty());
  }

  TEST_CASE("subsample keeps a seeded fraction with its tags") {
    const Dataset ds = split(numbered(50), 0.8, 1);
    const Dataset sub = subsample(ds, 0.4, 2);
    CHECK(sub.sequences.size() == 20);
    CHECK(sub.split.size() == 20);
    CHECK(subsample(ds, 0.4, 2).split == sub.split);
    sub.validate();
  }

  TEST_CASE("validate rejects broken datasets") {
    Dataset ds = numbered(2);
    ds.validate();
    Dataset bad = ds;
    bad.sequences[0].events[0].item = 4;
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = ds;
    bad.sequences[0].events.clear();
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = ds;
    std::swap(bad.sequences[0].events[0], bad.sequences[0].events[1]);
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = ds;
    bad.sequences[1].domain = Domain::A;
    CHECK_THROWS_AS(bad.validate(), DataError);
  }

  TEST_CASE("generate: deterministic per seed with exact counts") {
    SyntheticSpec spec;
    spec.n_accounts = 40;
    spec.n_items_a = 60;
    spec.n_items_b = 70;
    spec.n_sequences = 65;
    const auto a = generate(spec);
    const auto b = generate(spec);
    CHECK(write_string(a.dataset) == write_string(b.dataset));
    CHECK(a.truth.event_user == b.truth.event_user);
    spec.seed = 2;
    CHECK(write_string(generate(spec).dataset) != write_string(a.dataset));
    const Dataset& ds = a.dataset;
    ds.validate();
    CHECK(ds.n_accounts() == 40);
    CHECK(ds.n_items(Domain::A) == 60);
    CHECK(ds.n_items(Domain::B) == 70);
    CHECK(ds.sequences.size() == 65);
    std::set<std::size_t> accounts;
    for (const auto& s : ds.sequences) {
      accounts.insert(s.account);
      CHECK(s.events.size() >= spec.seq_len_min);
      CHECK(s.events.size() <= spec.seq_len_max);
      for (std::size_t e = 1; e < s.events.size(); ++e) {
        CHECK(s.events[e].timestamp > s.events[e - 1].timestamp);
      }
    }
    CHECK(accounts.size() == 40);
    // Users per account within range.
    for (std::size_t acc = 0; acc < 40; ++acc) {
      const std::size_t first = a.truth.first_user[acc];
      const std::size_t next = acc + 1 < 40 ? a.truth.first_user[acc + 1] : a.truth.user_account.size();
      CHECK(next - first >= spec.users_min);
      CHECK(next - first <= spec.users_max);
    }
  }

  TEST_CASE("generate: spec validation and key=value reading") {
    SyntheticSpec bad;
    bad.correlation = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.users_min = 3;
    bad.users_max = 2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.n_sequences = 3 * bad.n_accounts;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    std::istringstream in("n_accounts = 12\ncorrelation = 0.25\nseed = 9\n");
    const SyntheticSpec s = SyntheticSpec::from(KeyValues::parse(in));
    CHECK(s.n_accounts == 12);
    CHECK(s.correlation == 0.25);
    CHECK(s.seed == 9);
    std::istringstream unknown("n_acounts = 12\n");
    CHECK_THROWS_AS(SyntheticSpec::from(KeyValues::parse(unknown)), ConfigError);
  }

  TEST_CASE("generate: correlation 0 makes cross-domain topics independent") {
    // Pairs (A-topic, B-topic) of every user over >= 10^4 events; the plug-in
    // MI estimate has bias about (k-1)^2 / (2N) nats.
    SyntheticSpec spec;
    spec.n_accounts = 1500;
    spec.n_items_a = spec.n_items_b = 80;
    spec.correlation = 0.0;
    spec.seed = 11;
    const auto data = generate(spec);
    CHECK(data.dataset.n_events() >= 10000);
    const auto& t = data.truth;
    const double mi0 = mutual_information(t.user_topic[0], t.user_topic[1], spec.n_topics);
    const double bias = 49.0 / (2.0 * static_cast<double>(t.user_topic[0].size()));
    MESSAGE("MI at correlation 0: " << mi0 << " (bias ~" << bias << ")");
    CHECK(mi0 < 3 * bias + 0.01);
    spec.correlation = 0.6;
    const auto corr = generate(spec);
    const double mi6 =
        mutual_information(corr.truth.user_topic[0], corr.truth.user_topic[1], spec.n_topics);
    CHECK(mi6 > 0.3);
  }

  TEST_CASE("generate: durable items have about 10x the mean gap of consumables") {
    SyntheticSpec spec;
    spec.n_accounts = 800;
    spec.seed = 5;
    const auto data = generate(spec);
    double sum[2] = {0, 0};
    double count[2] = {0, 0};
    for (const auto& s : data.dataset.sequences) {
      for (std::size_t e = 1; e < s.events.size(); ++e) {
        const std::size_t type = spec.type_of(s.domain, s.events[e - 1].item);
        sum[type] += static_cast<double>(s.events[e].timestamp - s.events[e - 1].timestamp);
        count[type] += 1;
      }
    }
    CHECK(count[0] + count[1] >= 10000);
    const double ratio = (sum[1] / count[1]) / (sum[0] / count[0]);
    MESSAGE("mean-gap ratio " << ratio);
    CHECK(ratio >= 5.0);
    CHECK(ratio <= 20.0);
  }

  TEST_CASE("generate: TSV round trip keeps every event") {
    SyntheticSpec spec;
    spec.n_accounts = 10;
    spec.n_items_a = spec.n_items_b = 30;
    const auto data = generate(spec);
    const Dataset back = parse_string(write_string(data.dataset));
    CHECK(back.n_events() == data.dataset.n_events());
    CHECK(back.sequences.size() == data.dataset.sequences.size());
    CHECK(write_string(back) == write_string(data.dataset));
  }

  TEST_CASE("key=value files") {
    std::istringstream in("# c\n a = 1.5 \n\nb=true\nc = text # kept\n");
    KeyValues kv = KeyValues::parse(in);
    CHECK(kv.get_double("a", 0) == 1.5);
    CHECK(kv.get_bool("b", false));
    CHECK(kv.get_string("c", "") == "text # kept");  // no trailing comments
    kv.require_all_used();
    std::istringstream dup("a = 1\na = 2\n");
    CHECK_THROWS_AS(KeyValues::parse(dup), ConfigError);
    std::istringstream bad("just words\n");
    CHECK_THROWS_AS(KeyValues::parse(bad), ConfigError);
    std::istringstream num("x = 1.5z\n");
    KeyValues kn = KeyValues::parse(num);
    CHECK_THROWS_AS(kn.get_double("x", 0), ConfigError);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
  }
}
