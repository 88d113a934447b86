#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "l2ai/clock.hpp"
#include "l2ai/digest.hpp"
#include "l2ai/encoding.hpp"

namespace l2ai {

using EntityId = std::string;

struct Envelope {
  std::uint64_t seq = 0;
  EntityId from;
  EntityId to;
  std::string kind;     // "msg1", "reg-request", ...
  std::string context;  // out-of-band metadata (requested scope); not protocol bytes
  Bytes payload;
  Timestamp send_time;
  Timestamp deliver_time;
  bool secure = false;    // setup channel: adversary actions never apply
  bool replayed = false;  // adversary copy of an earlier envelope
};

// Empty fields match anything.
struct Match {
  std::optional<EntityId> from;
  std::optional<EntityId> to;
  std::optional<std::uint64_t> seq;

  bool matches(const Envelope& env) const;
  friend bool operator==(const Match&, const Match&) = default;
};

struct Eavesdrop {};
struct Drop {};
struct Delay {
  std::uint64_t extra_ms = 0;
};
struct Modify {
  std::size_t offset = 0;
  std::uint8_t mask = 0;
};
// Fires once the matched envelope has been eavesdropped. `at` is absolute
// unless relative is set, in which case it is an offset from the original
// send time.
struct Replay {
  std::uint64_t of_seq = 0;
  Timestamp at;
  bool relative = false;
};

using ActionKind = std::variant<Eavesdrop, Drop, Delay, Modify, Replay>;

struct AdversaryAction {
  Match match;
  ActionKind kind;
};

enum class EventType { Send, Deliver, Drop, Eavesdrop, Modify, Delay, Replay, Accept, Reject, Note };

std::string_view event_type_name(EventType t) noexcept;

struct Event {
  Timestamp at;
  EventType type = EventType::Note;
  std::uint64_t seq = 0;
  EntityId entity;  // sender/receiver or the entity reporting an outcome
  std::string kind;
  std::string detail;

  // "<millis> <type> <seq> <entity> <kind> <detail>", fields space separated.
  std::string to_line() const;
};

class EventLog {
 public:
  void push(Event e) { events_.push_back(std::move(e)); }
  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  std::vector<std::string> lines() const;
  Digest160 digest() const;  // over the exported lines, uncounted

 private:
  std::vector<Event> events_;
};

// Deterministic discrete-event insecure channel. Owns the delivery queue and
// drives the shared clock forward; entities are invoked synchronously.
class Channel {
 public:
  using Handler = std::function<void(const Envelope&)>;

  explicit Channel(ClockHandle clock, Timestamp base_delay = ms(50));

  void attach(const EntityId& entity, Handler handler);
  void add_action(AdversaryAction action);

  // Returns the assigned seq. Sending to an unattached entity is allowed;
  // the delivery is logged and dropped.
  std::uint64_t send(const EntityId& from, const EntityId& to, std::string kind, Bytes payload,
                     std::string context = {}, bool secure = false);

  // Byte-identical copy of an eavesdropped envelope, delivered at `at`.
  // Throws Error(UnknownSeq).
  void replay(std::uint64_t of_seq, Timestamp at);

  // Processes deliveries in (time, seq) order until the queue is empty.
  // Returns the events logged during this call.
  EventLog step();

  // Entity-reported outcome, stamped with the current clock.
  void record(EventType type, const EntityId& entity, std::string kind, std::string detail,
              std::uint64_t seq = 0);

  std::uint64_t next_seq() const noexcept { return next_seq_; }
  Timestamp base_delay() const noexcept { return base_delay_; }
  const ClockHandle& clock() const noexcept { return clock_; }
  const EventLog& log() const noexcept { return log_; }

  // Payloads of every eavesdropped envelope, by seq.
  const std::map<std::uint64_t, Envelope>& knowledge() const noexcept { return knowledge_; }
  // Every payload that crossed the channel, including modified and replayed
  // copies, in send order.
  const std::vector<Bytes>& wire() const noexcept { return wire_; }
  std::size_t pending_replays() const noexcept { return armed_.size(); }

 private:
  struct Queued {
    Timestamp at;
    std::uint64_t seq;
    std::uint64_t order;
    Envelope env;
  };
  struct Later {
    bool operator()(const Queued& a, const Queued& b) const {
      if (a.at != b.at) return a.at > b.at;
      if (a.seq != b.seq) return a.seq > b.seq;
      return a.order > b.order;
    }
  };

  void push_event(Event e);
  void schedule(Envelope env);
  void fire_armed(const Envelope& seen);

  ClockHandle clock_;
  Timestamp base_delay_;
  std::map<EntityId, Handler> handlers_;
  std::vector<AdversaryAction> actions_;
  std::vector<Replay> armed_;
  std::priority_queue<Queued, std::vector<Queued>, Later> queue_;
  std::map<std::uint64_t, Envelope> knowledge_;
  std::vector<Bytes> wire_;
  EventLog log_;
  std::size_t step_mark_ = 0;
  std::uint64_t next_seq_ = 1;
  std::uint64_t order_ = 0;
};

}  // namespace l2ai
