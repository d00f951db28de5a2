// SPDX-License-Identifier: Apache-2.0
//
// Single-router content store + pending interest table. The node never
// authenticates anything; it only moves packets.

#pragma once

#include "phyauth/ndn_packet.hpp"

#include <cstdint>
#include <list>
#include <map>
#include <set>
#include <vector>

namespace phyauth::ndn {

using FaceId = std::uint32_t;

enum class ActionKind {
  RespondFromCache,  // interest satisfied from the content store
  Forward,           // new PIT entry, interest sent upstream
  Aggregate,         // requester added to an existing PIT entry
  SatisfyPending,    // data sent to every face waiting in the PIT
  DropUnsolicited,   // data with no matching PIT entry
  DropMalformed,
};

const char* to_string(ActionKind k);

struct Action {
  ActionKind kind;
  std::vector<FaceId> faces;
  NdnName name;
};

struct NodeConfig {
  std::size_t cs_capacity = 64;
  double interest_lifetime = 4.0;  // seconds
};

struct NodeCounters {
  std::uint64_t malformed = 0;
  std::uint64_t unsolicited = 0;
  std::uint64_t cs_hits = 0;
  std::uint64_t forwarded = 0;
  std::uint64_t aggregated = 0;
  std::uint64_t expired = 0;
};

class ForwarderNode {
public:
  explicit ForwarderNode(NodeConfig cfg = {}) : cfg_(cfg) {}

  std::vector<Action> on_interest(const InterestPacket& interest, FaceId from, double now);
  std::vector<Action> on_data(const DataPacket& data, FaceId from, double now);
  // Decodes first; undecodable bytes are dropped and counted.
  std::vector<Action> on_wire(const Bytes& wire, FaceId from, double now);

  // Removes PIT entries whose lifetime has passed.
  std::size_t expire(double now);

  std::size_t cs_size() const { return cs_index_.size(); }
  std::size_t pit_size() const { return pit_.size(); }
  bool cs_contains(const NdnName& name) const { return cs_index_.count(name) != 0; }
  bool pit_contains(const NdnName& name) const { return pit_.count(name) != 0; }
  const NodeCounters& counters() const { return counters_; }

private:
  struct PitEntry {
    std::set<FaceId> faces;
    double expiry;
  };

  void cs_insert(const DataPacket& d);

  NodeConfig cfg_;
  // Most recently used at the front.
  std::list<DataPacket> cs_lru_;
  std::map<NdnName, std::list<DataPacket>::iterator> cs_index_;
  std::map<NdnName, PitEntry> pit_;
  NodeCounters counters_;
};

}  // namespace phyauth::ndn
