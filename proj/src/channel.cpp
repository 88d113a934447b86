#include "l2ai/channel.hpp"

#include <algorithm>

#include "l2ai/error.hpp"
#include "l2ai/hash.hpp"

namespace l2ai {

bool Match::matches(const Envelope& env) const {
  return (!from || *from == env.from) && (!to || *to == env.to) && (!seq || *seq == env.seq);
}

std::string_view event_type_name(EventType t) noexcept {
  switch (t) {
    case EventType::Send: return "send";
    case EventType::Deliver: return "deliver";
    case EventType::Drop: return "drop";
    case EventType::Eavesdrop: return "eavesdrop";
    case EventType::Modify: return "modify";
    case EventType::Delay: return "delay";
    case EventType::Replay: return "replay";
    case EventType::Accept: return "accept";
    case EventType::Reject: return "reject";
    case EventType::Note: return "note";
  }
  return "?";
}

std::string Event::to_line() const {
  auto field = [](const std::string& s) { return s.empty() ? std::string("-") : s; };
  std::string line = std::to_string(at.millis) + ' ' + std::string(event_type_name(type)) + ' ' +
                     std::to_string(seq) + ' ' + field(entity) + ' ' + field(kind);
  if (!detail.empty()) line += ' ' + detail;
  return line;
}

std::vector<std::string> EventLog::lines() const {
  std::vector<std::string> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(e.to_line());
  return out;
}

Digest160 EventLog::digest() const {
  Bytes all;
  for (const auto& line : lines()) {
    append(all, as_bytes(line));
    all.push_back('\n');
  }
  return detail::sha256_160({ByteView(all)});
}

Channel::Channel(ClockHandle clock, Timestamp base_delay) : clock_(std::move(clock)), base_delay_(base_delay) {}

void Channel::attach(const EntityId& entity, Handler handler) { handlers_[entity] = std::move(handler); }

void Channel::add_action(AdversaryAction action) {
  if (const auto* r = std::get_if<Replay>(&action.kind)) {
    armed_.push_back(*r);
    if (knowledge_.count(r->of_seq)) fire_armed(knowledge_.at(r->of_seq));
    return;
  }
  actions_.push_back(std::move(action));
}

void Channel::push_event(Event e) { log_.push(std::move(e)); }

void Channel::record(EventType type, const EntityId& entity, std::string kind, std::string detail,
                     std::uint64_t seq) {
  push_event(Event{clock_->now(), type, seq, entity, std::move(kind), std::move(detail)});
}

std::uint64_t Channel::send(const EntityId& from, const EntityId& to, std::string kind, Bytes payload,
                            std::string context, bool secure) {
  Envelope env;
  env.seq = next_seq_++;
  env.from = from;
  env.to = to;
  env.kind = std::move(kind);
  env.context = std::move(context);
  env.payload = std::move(payload);
  env.send_time = clock_->now();
  env.deliver_time = env.send_time + base_delay_;
  env.secure = secure;

  push_event(Event{env.send_time, EventType::Send, env.seq, from + "->" + to, env.kind,
                   "len=" + std::to_string(env.payload.size()) + (secure ? " setup " : " ") + to_hex(env.payload)});
  wire_.push_back(env.payload);

  bool dropped = false;
  bool seen = false;
  bool modified = false;
  if (!secure) {
    for (const auto& action : actions_) {
      if (!action.match.matches(env)) continue;
      std::visit(
          [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, Eavesdrop>) {
              if (!seen) {
                knowledge_[env.seq] = env;
                seen = true;
                push_event(Event{env.send_time, EventType::Eavesdrop, env.seq, "adversary", env.kind, ""});
              }
            } else if constexpr (std::is_same_v<T, Drop>) {
              dropped = true;
              push_event(Event{env.send_time, EventType::Drop, env.seq, "adversary", env.kind, ""});
            } else if constexpr (std::is_same_v<T, Delay>) {
              env.deliver_time = env.deliver_time + ms(a.extra_ms);
              push_event(Event{env.send_time, EventType::Delay, env.seq, "adversary", env.kind,
                               "extra=" + std::to_string(a.extra_ms)});
            } else if constexpr (std::is_same_v<T, Modify>) {
              if (a.offset < env.payload.size()) {
                env.payload[a.offset] ^= a.mask;
                modified = true;
              }
              push_event(Event{env.send_time, EventType::Modify, env.seq, "adversary", env.kind,
                               "offset=" + std::to_string(a.offset) + " mask=" + to_hex(Bytes{a.mask})});
            }
          },
          action.kind);
    }
  }
  if (modified) wire_.push_back(env.payload);
  if (seen) fire_armed(knowledge_.at(env.seq));
  if (!dropped) schedule(std::move(env));
  return next_seq_ - 1;
}

void Channel::fire_armed(const Envelope& seen) {
  std::vector<Replay> due;
  auto it = std::stable_partition(armed_.begin(), armed_.end(),
                                  [&](const Replay& r) { return r.of_seq != seen.seq; });
  due.assign(it, armed_.end());
  armed_.erase(it, armed_.end());
  for (const Replay& r : due) replay(r.of_seq, r.relative ? seen.send_time + r.at : r.at);
}

void Channel::replay(std::uint64_t of_seq, Timestamp at) {
  const auto it = knowledge_.find(of_seq);
  if (it == knowledge_.end()) throw Error(ErrorCode::UnknownSeq, "seq " + std::to_string(of_seq) + " never eavesdropped");
  Envelope copy = it->second;
  copy.replayed = true;
  copy.send_time = clock_->now();
  copy.deliver_time = std::max(at, copy.send_time);
  push_event(Event{copy.send_time, EventType::Replay, of_seq, "adversary", copy.kind,
                   "at=" + std::to_string(copy.deliver_time.millis)});
  wire_.push_back(copy.payload);
  schedule(std::move(copy));
}

void Channel::schedule(Envelope env) {
  const Timestamp at = env.deliver_time;
  const std::uint64_t seq = env.seq;
  queue_.push(Queued{at, seq, order_++, std::move(env)});
}

EventLog Channel::step() {
  const std::size_t mark = log_.size();
  while (!queue_.empty()) {
    Queued q = queue_.top();
    queue_.pop();
    clock_->advance_to(q.at);
    push_event(Event{q.at, EventType::Deliver, q.env.seq, q.env.to, q.env.kind, q.env.replayed ? "replayed" : ""});
    const auto h = handlers_.find(q.env.to);
    if (h == handlers_.end()) {
      record(EventType::Note, q.env.to, q.env.kind, "no-handler", q.env.seq);
      continue;
    }
    h->second(q.env);
  }
  EventLog out;
  for (std::size_t i = mark; i < log_.size(); ++i) out.push(log_.events()[i]);
  return out;
}

}  // namespace l2ai
