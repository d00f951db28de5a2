// SPDX-License-Identifier: Apache-2.0

#include "phyauth/ndn_packet.hpp"

#include <algorithm>
#include <charconv>

namespace phyauth::ndn {

namespace {

bool unreserved(std::uint8_t c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

bool is_phy_hex(const Bytes& c) {
  if (c.size() != 64) {
    return false;
  }
  return std::all_of(c.begin(), c.end(),
                     [](std::uint8_t v) { return (v >= '0' && v <= '9') || (v >= 'a' && v <= 'f'); });
}

struct Reader {
  const std::uint8_t* p;
  std::size_t n;
  std::size_t pos = 0;

  bool done() const { return pos == n; }

  std::uint8_t peek_type() const {
    if (pos >= n) {
      throw DecodeError("truncated: expected a type byte");
    }
    return p[pos];
  }

  // Returns the value bytes of the next element, which must have the given type.
  Reader expect(std::uint8_t type) {
    const std::uint8_t t = peek_type();
    if (t != type) {
      throw DecodeError("unexpected type 0x" + to_hex(Bytes{t}) + ", wanted 0x" + to_hex(Bytes{type}));
    }
    if (n - pos < 5) {
      throw DecodeError("truncated: length field");
    }
    const std::uint32_t len = (std::uint32_t{p[pos + 1]} << 24) | (std::uint32_t{p[pos + 2]} << 16) |
                              (std::uint32_t{p[pos + 3]} << 8) | std::uint32_t{p[pos + 4]};
    if (len > kMaxTlvLength) {
      throw DecodeError("length overflow: " + std::to_string(len));
    }
    if (n - pos - 5 < len) {
      throw DecodeError("truncated: value shorter than its length");
    }
    Reader inner{p + pos + 5, len};
    pos += 5 + len;
    return inner;
  }

  Bytes rest() const { return Bytes(p + pos, p + n); }
};

NdnName read_name(Reader r) {
  NdnName name;
  while (!r.done()) {
    name.components.push_back(r.expect(tlv::NameComponent).rest());
  }
  return name;
}

DataPacket read_data(Reader r) {
  DataPacket d;
  d.name = read_name(r.expect(tlv::Name));
  d.content = r.expect(tlv::Content).rest();
  if (!r.done() && r.peek_type() == tlv::KeyLocator) {
    Reader kl = r.expect(tlv::KeyLocator);
    d.key_locator = read_name(kl.expect(tlv::Name));
    if (!kl.done()) {
      throw DecodeError("trailing bytes inside key locator");
    }
  }
  if (!r.done() && r.peek_type() == tlv::SignatureValue) {
    d.signature_value = r.expect(tlv::SignatureValue).rest();
  }
  if (!r.done()) {
    throw DecodeError("unexpected element 0x" + to_hex(Bytes{r.peek_type()}) + " in data packet");
  }
  return d;
}

InterestPacket read_interest(Reader r) {
  InterestPacket i;
  i.name = read_name(r.expect(tlv::Name));
  Bytes nonce = r.expect(tlv::Nonce).rest();
  if (nonce.size() != 8) {
    throw DecodeError("nonce must be 8 bytes");
  }
  std::copy(nonce.begin(), nonce.end(), i.nonce.begin());
  if (!r.done()) {
    throw DecodeError("unexpected element in interest packet");
  }
  return i;
}

}  // namespace

NdnName NdnName::from_uri(const std::string& uri) {
  if (uri.empty() || uri[0] != '/') {
    throw NameError("name URI must start with '/'");
  }
  NdnName name;
  if (uri == "/") {
    return name;
  }
  std::size_t start = 1;
  while (start <= uri.size()) {
    std::size_t end = uri.find('/', start);
    if (end == std::string::npos) {
      end = uri.size();
    }
    const std::string part = uri.substr(start, end - start);
    if (part.empty()) {
      throw NameError("empty name component in '" + uri + "'");
    }
    Bytes comp;
    for (std::size_t i = 0; i < part.size(); ++i) {
      if (part[i] == '%') {
        if (i + 2 >= part.size()) {
          throw NameError("bad percent escape in '" + uri + "'");
        }
        const int hi = hex_value(part[i + 1]);
        const int lo = hex_value(part[i + 2]);
        if (hi < 0 || lo < 0) {
          throw NameError("bad percent escape in '" + uri + "'");
        }
        comp.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
        i += 2;
      } else {
        comp.push_back(static_cast<std::uint8_t>(part[i]));
      }
    }
    name.components.push_back(std::move(comp));
    start = end + 1;
  }
  return name;
}

std::string NdnName::to_uri() const {
  if (components.empty()) {
    return "/";
  }
  static constexpr char kHexUpper[] = "0123456789ABCDEF";
  std::string s;
  for (const auto& c : components) {
    s.push_back('/');
    for (std::uint8_t b : c) {
      if (unreserved(b)) {
        s.push_back(static_cast<char>(b));
      } else {
        s.push_back('%');
        s.push_back(kHexUpper[b >> 4]);
        s.push_back(kHexUpper[b & 0xf]);
      }
    }
  }
  return s;
}

NdnName NdnName::append(const std::string& component) const { return append(to_bytes(component)); }

NdnName NdnName::append(const Bytes& component) const {
  NdnName out = *this;
  out.components.push_back(component);
  return out;
}

bool NdnName::is_prefix_of(const NdnName& other) const {
  return components.size() <= other.components.size() &&
         std::equal(components.begin(), components.end(), other.components.begin());
}

NdnName make_phy_name(const PhyName& parts) {
  NdnName n = parts.prefix;
  n.components.push_back(to_bytes(parts.phy_id.hex));
  for (const auto& p : parts.path) {
    if (p.empty()) {
      throw NameError("empty path component");
    }
    n.components.push_back(to_bytes(p));
  }
  n.components.push_back(to_bytes(std::to_string(parts.seq)));
  return n;
}

PhyName parse_phy_name(const NdnName& name) {
  const auto& c = name.components;
  auto it = std::find_if(c.begin(), c.end(), is_phy_hex);
  if (it == c.end()) {
    throw NameError("name carries no PHY-ID component");
  }
  if (it + 1 == c.end()) {
    throw NameError("name lacks a sequence number after the PHY-ID");
  }
  PhyName out;
  out.prefix.components.assign(c.begin(), it);
  out.phy_id = phy_id_from_hex(std::string(it->begin(), it->end()));
  for (auto p = it + 1; p + 1 != c.end(); ++p) {
    out.path.emplace_back(p->begin(), p->end());
  }
  const Bytes& last = c.back();
  const char* first = reinterpret_cast<const char*>(last.data());
  const auto res = std::from_chars(first, first + last.size(), out.seq);
  if (res.ec != std::errc() || res.ptr != first + last.size() || last.empty()) {
    throw NameError("sequence component is not a decimal number");
  }
  return out;
}

void append_tlv(Bytes& out, std::uint8_t type, const Bytes& value) {
  if (value.size() > kMaxTlvLength) {
    throw std::length_error("TLV value too long");
  }
  const auto len = static_cast<std::uint32_t>(value.size());
  out.push_back(type);
  out.push_back(static_cast<std::uint8_t>(len >> 24));
  out.push_back(static_cast<std::uint8_t>(len >> 16));
  out.push_back(static_cast<std::uint8_t>(len >> 8));
  out.push_back(static_cast<std::uint8_t>(len));
  out.insert(out.end(), value.begin(), value.end());
}

Bytes encode_name(const NdnName& name) {
  Bytes inner;
  for (const auto& c : name.components) {
    append_tlv(inner, tlv::NameComponent, c);
  }
  Bytes out;
  append_tlv(out, tlv::Name, inner);
  return out;
}

Bytes encode_content(const Bytes& content) {
  Bytes out;
  append_tlv(out, tlv::Content, content);
  return out;
}

Bytes signed_portion(const DataPacket& p) {
  Bytes out = encode_name(p.name);
  const Bytes c = encode_content(p.content);
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

Bytes encode(const DataPacket& p) {
  Bytes inner = signed_portion(p);
  if (p.key_locator) {
    append_tlv(inner, tlv::KeyLocator, encode_name(*p.key_locator));
  }
  if (p.signature_value) {
    append_tlv(inner, tlv::SignatureValue, *p.signature_value);
  }
  Bytes out;
  append_tlv(out, tlv::Data, inner);
  return out;
}

Bytes encode(const InterestPacket& p) {
  Bytes inner = encode_name(p.name);
  append_tlv(inner, tlv::Nonce, Bytes(p.nonce.begin(), p.nonce.end()));
  Bytes out;
  append_tlv(out, tlv::Interest, inner);
  return out;
}

Bytes encode(const Packet& p) {
  return std::visit([](const auto& v) { return encode(v); }, p);
}

Packet decode(const Bytes& wire) {
  Reader r{wire.data(), wire.size()};
  const std::uint8_t t = r.peek_type();
  Packet out;
  if (t == tlv::Data) {
    out = read_data(r.expect(tlv::Data));
  } else if (t == tlv::Interest) {
    out = read_interest(r.expect(tlv::Interest));
  } else {
    throw DecodeError("unknown top-level type 0x" + to_hex(Bytes{t}));
  }
  if (!r.done()) {
    throw DecodeError("trailing bytes after packet");
  }
  return out;
}

DataPacket decode_data(const Bytes& wire) {
  Packet p = decode(wire);
  if (auto* d = std::get_if<DataPacket>(&p)) {
    return *d;
  }
  throw DecodeError("wire holds an interest, not data");
}

InterestPacket decode_interest(const Bytes& wire) {
  Packet p = decode(wire);
  if (auto* i = std::get_if<InterestPacket>(&p)) {
    return *i;
  }
  throw DecodeError("wire holds data, not an interest");
}

std::string to_hex(const Bytes& b) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (std::uint8_t v : b) {
    s.push_back(kHex[v >> 4]);
    s.push_back(kHex[v & 0xf]);
  }
  return s;
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) {
    throw DecodeError("odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw DecodeError("invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return out;
}

}  // namespace phyauth::ndn
