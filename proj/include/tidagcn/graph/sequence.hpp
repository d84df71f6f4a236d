#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tidagcn {

enum class Domain : std::uint8_t { A = 0, B = 1 };

inline constexpr Domain other(Domain d) { return d == Domain::A ? Domain::B : Domain::A; }
inline constexpr char domain_letter(Domain d) { return d == Domain::A ? 'A' : 'B'; }
inline constexpr std::size_t index_of(Domain d) { return static_cast<std::size_t>(d); }

struct Event {
  std::size_t item;        // domain-local dense id
  std::int64_t timestamp;  // seconds

  bool operator==(const Event&) const = default;
};

// One account's time-ordered events in one domain.
struct InteractionSequence {
  std::size_t account = 0;
  Domain domain = Domain::A;
  std::vector<Event> events;

  bool operator==(const InteractionSequence&) const = default;
};

}  // namespace tidagcn
