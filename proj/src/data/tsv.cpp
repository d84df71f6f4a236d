#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "tidagcn/data/dataset.hpp"
#include "tidagcn/numeric/errors.hpp"

namespace tidagcn {
namespace {

struct RawEvent {
  std::uint64_t account;
  Domain domain;
  std::uint64_t item;
  std::int64_t timestamp;
};

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                  what);
}

template <class T>
T parse_number(std::string_view field, std::size_t line, std::size_t column, const char* name) {
  T value{};
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (field.empty()) fail(line, column, std::string("empty ") + name);
  if (field[0] == '+' ) fail(line, column, std::string("malformed ") + name);
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec == std::errc::result_out_of_range) fail(line, column, std::string(name) + " out of range");
  if (ec != std::errc() || ptr != end) {
    fail(line, column + static_cast<std::size_t>(ptr - begin),
         std::string("malformed ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

RawEvent parse_line(std::string_view text, std::size_t line) {
  std::string_view fields[4];
  std::size_t columns[4];
  std::size_t start = 0;
  for (std::size_t f = 0; f < 4; ++f) {
    const std::size_t tab = text.find('\t', start);
    if (f < 3 && tab == std::string_view::npos) {
      fail(line, text.size() + 1, "expected 4 TAB-separated fields, found " + std::to_string(f + 1));
    }
    if (f == 3 && tab != std::string_view::npos) fail(line, tab + 1, "more than 4 fields");
    columns[f] = start + 1;
    fields[f] = text.substr(start, (f < 3 ? tab : text.size()) - start);
    start = tab + 1;
  }
  RawEvent ev;
  ev.account = parse_number<std::uint64_t>(fields[0], line, columns[0], "account id");
  if (fields[1] == "A") {
    ev.domain = Domain::A;
  } else if (fields[1] == "B") {
    ev.domain = Domain::B;
  } else {
    fail(line, columns[1], "domain must be A or B, got '" + std::string(fields[1]) + "'");
  }
  ev.item = parse_number<std::uint64_t>(fields[2], line, columns[2], "item id");
  ev.timestamp = parse_number<std::int64_t>(fields[3], line, columns[3], "timestamp");
  return ev;
}

std::vector<std::uint64_t> sorted_unique(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t dense(const std::vector<std::uint64_t>& table, std::uint64_t raw) {
  return static_cast<std::size_t>(std::lower_bound(table.begin(), table.end(), raw) - table.begin());
}

}  // namespace

Dataset parse_tsv(std::istream& in) {
  std::vector<RawEvent> events;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos || text[0] == '#') continue;
    events.push_back(parse_line(text, line));
  }

  Dataset ds;
  std::vector<std::uint64_t> accounts, items[2];
  for (const auto& e : events) {
    accounts.push_back(e.account);
    items[index_of(e.domain)].push_back(e.item);
  }
  ds.account_ids = sorted_unique(std::move(accounts));
  ds.item_ids[0] = sorted_unique(std::move(items[0]));
  ds.item_ids[1] = sorted_unique(std::move(items[1]));

  // File order within each group is kept, then stably sorted by time.
  std::map<std::pair<std::size_t, Domain>, std::vector<Event>> groups;
  for (const auto& e : events) {
    groups[{dense(ds.account_ids, e.account), e.domain}].push_back(
        {dense(ds.item_ids[index_of(e.domain)], e.item), e.timestamp});
  }
  for (auto& [key, evs] : groups) {
    const auto by_time = [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; };
    if (!std::is_sorted(evs.begin(), evs.end(), by_time)) {
      ++ds.unsorted_sequences;
      std::stable_sort(evs.begin(), evs.end(), by_time);
    }
    ds.sequences.push_back({key.first, key.second, std::move(evs)});
  }
  return ds;
}

Dataset parse_tsv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  try {
    return parse_tsv(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_tsv(const Dataset& dataset, std::ostream& out) {
  for (const auto& s : dataset.sequences) {
    const auto& items = dataset.item_ids[index_of(s.domain)];
    for (const auto& e : s.events) {
      out << dataset.account_ids.at(s.account) << '\t' << domain_letter(s.domain) << '\t'
          << items.at(e.item) << '\t' << e.timestamp << '\n';
    }
  }
}

void write_tsv_file(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write data file '" + path + "'");
  write_tsv(dataset, out);
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace tidagcn
