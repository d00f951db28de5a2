// SPDX-License-Identifier: Apache-2.0

#include "phyauth/ndn_forwarder.hpp"

namespace phyauth::ndn {

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::RespondFromCache:
      return "respond_from_cache";
    case ActionKind::Forward:
      return "forward";
    case ActionKind::Aggregate:
      return "aggregate";
    case ActionKind::SatisfyPending:
      return "satisfy_pending";
    case ActionKind::DropUnsolicited:
      return "drop_unsolicited";
    case ActionKind::DropMalformed:
      return "drop_malformed";
  }
  return "?";
}

std::vector<Action> ForwarderNode::on_interest(const InterestPacket& interest, FaceId from,
                                               double now) {
  expire(now);
  if (auto it = cs_index_.find(interest.name); it != cs_index_.end()) {
    cs_lru_.splice(cs_lru_.begin(), cs_lru_, it->second);
    ++counters_.cs_hits;
    return {{ActionKind::RespondFromCache, {from}, interest.name}};
  }
  if (auto it = pit_.find(interest.name); it != pit_.end()) {
    it->second.faces.insert(from);
    ++counters_.aggregated;
    return {{ActionKind::Aggregate, {from}, interest.name}};
  }
  pit_.emplace(interest.name, PitEntry{{from}, now + cfg_.interest_lifetime});
  ++counters_.forwarded;
  return {{ActionKind::Forward, {from}, interest.name}};
}

std::vector<Action> ForwarderNode::on_data(const DataPacket& data, FaceId from, double now) {
  expire(now);
  auto it = pit_.find(data.name);
  if (it == pit_.end()) {
    ++counters_.unsolicited;
    return {{ActionKind::DropUnsolicited, {from}, data.name}};
  }
  std::vector<FaceId> faces(it->second.faces.begin(), it->second.faces.end());
  pit_.erase(it);
  cs_insert(data);
  return {{ActionKind::SatisfyPending, std::move(faces), data.name}};
}

std::vector<Action> ForwarderNode::on_wire(const Bytes& wire, FaceId from, double now) {
  Packet p;
  try {
    p = decode(wire);
  } catch (const DecodeError&) {
    ++counters_.malformed;
    return {{ActionKind::DropMalformed, {from}, {}}};
  }
  if (auto* d = std::get_if<DataPacket>(&p)) {
    return on_data(*d, from, now);
  }
  return on_interest(std::get<InterestPacket>(p), from, now);
}

std::size_t ForwarderNode::expire(double now) {
  std::size_t n = 0;
  for (auto it = pit_.begin(); it != pit_.end();) {
    if (it->second.expiry <= now) {
      it = pit_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  counters_.expired += n;
  return n;
}

void ForwarderNode::cs_insert(const DataPacket& d) {
  if (cfg_.cs_capacity == 0) {
    return;
  }
  if (auto it = cs_index_.find(d.name); it != cs_index_.end()) {
    *it->second = d;
    cs_lru_.splice(cs_lru_.begin(), cs_lru_, it->second);
    return;
  }
  if (cs_index_.size() >= cfg_.cs_capacity) {
    cs_index_.erase(cs_lru_.back().name);
    cs_lru_.pop_back();
  }
  cs_lru_.push_front(d);
  cs_index_.emplace(d.name, cs_lru_.begin());
}

}  // namespace phyauth::ndn
