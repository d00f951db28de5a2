// SPDX-License-Identifier: Apache-2.0
//
// Minimal named-data packet model. Wire format, per element:
//   type (1 byte) | length (4 bytes, big-endian) | value
// Data   := DATA { NAME, CONTENT, [KEY_LOCATOR { NAME }], [SIGNATURE_VALUE] }
// Interest := INTEREST { NAME, NONCE (8 bytes) }

#pragma once

#include "phyauth/quantizer.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace phyauth::ndn {

using Bytes = std::vector<std::uint8_t>;

namespace tlv {
inline constexpr std::uint8_t Interest = 0x05;
inline constexpr std::uint8_t Data = 0x06;
inline constexpr std::uint8_t Name = 0x07;
inline constexpr std::uint8_t NameComponent = 0x08;
inline constexpr std::uint8_t Nonce = 0x0A;
inline constexpr std::uint8_t Content = 0x15;
inline constexpr std::uint8_t SignatureValue = 0x17;
inline constexpr std::uint8_t KeyLocator = 0x1C;
}  // namespace tlv

// Largest value length the decoder accepts.
inline constexpr std::uint32_t kMaxTlvLength = 1u << 24;

class DecodeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NameError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct NdnName {
  std::vector<Bytes> components;

  NdnName() = default;
  explicit NdnName(std::vector<Bytes> c) : components(std::move(c)) {}
  // "/a/b%2Fc" style; empty components are not allowed.
  static NdnName from_uri(const std::string& uri);
  std::string to_uri() const;

  NdnName append(const std::string& component) const;
  NdnName append(const Bytes& component) const;
  bool is_prefix_of(const NdnName& other) const;

  bool operator==(const NdnName& o) const { return components == o.components; }
  bool operator<(const NdnName& o) const { return components < o.components; }
};

struct PhyName {
  NdnName prefix;
  PhyId phy_id;
  std::vector<std::string> path;
  std::uint64_t seq = 0;
};

// /<prefix...>/<64 hex>/<path...>/<seq>
NdnName make_phy_name(const PhyName& parts);
// The PHY-ID component is the first one that is 64 lowercase hex characters.
PhyName parse_phy_name(const NdnName& name);

struct DataPacket {
  NdnName name;
  Bytes content;
  std::optional<NdnName> key_locator;
  std::optional<Bytes> signature_value;

  bool is_signed() const { return signature_value.has_value(); }
  bool operator==(const DataPacket& o) const = default;
};

struct InterestPacket {
  NdnName name;
  std::array<std::uint8_t, 8> nonce{};

  bool operator==(const InterestPacket& o) const = default;
};

using Packet = std::variant<DataPacket, InterestPacket>;

void append_tlv(Bytes& out, std::uint8_t type, const Bytes& value);
Bytes encode_name(const NdnName& name);
Bytes encode_content(const Bytes& content);
Bytes encode(const DataPacket& p);
Bytes encode(const InterestPacket& p);
Bytes encode(const Packet& p);

// Strict: unknown top-level type, truncation, oversize lengths, fields out
// of order and trailing bytes all raise DecodeError.
Packet decode(const Bytes& wire);
DataPacket decode_data(const Bytes& wire);
InterestPacket decode_interest(const Bytes& wire);

// The bytes a signature covers: encode(name) followed by encode(content).
Bytes signed_portion(const DataPacket& p);

std::string to_hex(const Bytes& b);
Bytes from_hex(const std::string& hex);

}  // namespace phyauth::ndn
