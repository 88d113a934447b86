#pragma once

#include <compare>
#include <cstdint>
#include <memory>

namespace l2ai {

// Simulated milliseconds since the start of a run.
struct Timestamp {
  std::uint64_t millis = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
  friend constexpr Timestamp operator+(Timestamp a, Timestamp b) noexcept {
    return Timestamp{a.millis + b.millis};
  }
};

constexpr Timestamp ms(std::uint64_t v) noexcept { return Timestamp{v}; }

inline constexpr Timestamp kDefaultFreshnessWindow{2000};

class SimClock {
 public:
  Timestamp now() const noexcept { return now_; }
  void advance(std::uint64_t millis) noexcept { now_.millis += millis; }
  // Never moves backwards; earlier targets are ignored.
  void advance_to(Timestamp t) noexcept {
    if (t > now_) now_ = t;
  }

 private:
  Timestamp now_{};
};

using ClockHandle = std::shared_ptr<SimClock>;

inline ClockHandle make_clock() { return std::make_shared<SimClock>(); }

inline Timestamp clock_now(const SimClock& clock) noexcept { return clock.now(); }

// |t_recv - t_msg| <= delta
constexpr bool is_fresh(Timestamp t_recv, Timestamp t_msg, Timestamp delta) noexcept {
  const std::uint64_t skew =
      t_recv >= t_msg ? t_recv.millis - t_msg.millis : t_msg.millis - t_recv.millis;
  return skew <= delta.millis;
}

}  // namespace l2ai
