// SPDX-License-Identifier: Apache-2.0
#include "phyauth/ndn_security.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace phyauth;
using namespace phyauth::ndn;

namespace {

std::string slurp(const std::string& file) {
  std::ifstream f(std::string(PHYAUTH_GOLDEN_DIR) + "/" + file);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const RsaKey& key1024() {
  static const RsaKey k = RsaKey::generate(1024);
  return k;
}

DataPacket sample() {
  return {NdnName::from_uri("/iot/x/1"), Bytes{'o', 'k'}, {}, {}};
}

}  // namespace

TEST_CASE("sign and verify") {
  const auto s = sign(sample(), key1024(), NdnName::from_uri("/iot/KEY"));
  REQUIRE(s.is_signed());
  CHECK(s.signature_value->size() == 128);
  CHECK(*s.key_locator == NdnName::from_uri("/iot/KEY"));
  CHECK(verify(s, key1024()));
  CHECK(verify(decode_data(encode(s)), key1024()));

  auto t = s;
  t.content.push_back('!');
  CHECK_FALSE(verify(t, key1024()));
  t = s;
  t.name = NdnName::from_uri("/iot/y/1");
  CHECK_FALSE(verify(t, key1024()));
  t = s;
  (*t.signature_value)[5] ^= 0x80;
  CHECK_FALSE(verify(t, key1024()));
  CHECK_FALSE(verify(sample(), key1024()));
  CHECK_FALSE(verify(s, RsaKey::generate(1024)));
  CHECK_THROWS_AS(sign(s, key1024(), NdnName::from_uri("/k")), SecurityError);
}

TEST_CASE("key serialization") {
  const auto& k = key1024();
  CHECK(k.bits() == 1024);
  CHECK(k.has_private());
  const auto pub = RsaKey::from_public_pem(k.public_pem());
  CHECK_FALSE(pub.has_private());
  CHECK(RsaKey::from_public_der(k.public_der()).public_pem() == k.public_pem());
  const auto again = RsaKey::from_private_pem(k.private_pem());
  const auto s = sign(sample(), again, NdnName::from_uri("/k"));
  CHECK(verify(s, pub));
  CHECK_THROWS_AS(sign(sample(), pub, NdnName::from_uri("/k")), SecurityError);
  CHECK_THROWS_AS(RsaKey::from_public_pem("garbage"), SecurityError);
  CHECK_THROWS_AS(RsaKey::generate(512), SecurityError);
}

TEST_CASE("signatures are deterministic: golden signed packet") {
  const auto key = RsaKey::from_private_pem(slurp("test_key.pem"));
  std::string hex = slurp("data_signed.hex");
  hex.erase(hex.find_last_not_of("\n") + 1);
  const auto golden = decode_data(from_hex(hex));
  CHECK(verify(golden, key));
  DataPacket bare{golden.name, golden.content, {}, {}};
  CHECK(encode(sign(bare, key, *golden.key_locator)) == from_hex(hex));
}

TEST_CASE("certificate chains") {
  const auto root = RsaKey::generate(1024);
  const auto mid = RsaKey::generate(1024);
  const auto leaf = RsaKey::generate(1024);
  const auto root_name = NdnName::from_uri("/root/KEY");
  const auto mid_name = NdnName::from_uri("/root/mid/KEY");
  const auto leaf_name = NdnName::from_uri("/root/mid/leaf/KEY");

  CertificateStore store;
  store[mid_name] = make_certificate(mid_name, mid, root, root_name);
  store[leaf_name] = make_certificate(leaf_name, leaf, mid, mid_name);
  const TrustAnchors anchors{{root_name, RsaKey::from_public_der(root.public_der())}};

  const auto pkt = sign(sample(), leaf, leaf_name);
  CHECK(verify_chain(pkt, anchors, store));
  CHECK(RsaKey::from_public_der(store[leaf_name].content).public_pem() == leaf.public_pem());

  // Leaf certificate signed by someone else.
  auto forged = store;
  forged[leaf_name] = make_certificate(leaf_name, leaf, RsaKey::generate(1024), mid_name);
  CHECK_FALSE(verify_chain(pkt, anchors, forged));

  // Missing intermediate.
  auto missing = store;
  missing.erase(mid_name);
  CHECK_FALSE(verify_chain(pkt, anchors, missing));

  // Two certificates vouching for each other with no anchor.
  CertificateStore loop;
  const auto a = NdnName::from_uri("/a/KEY"), b = NdnName::from_uri("/b/KEY");
  loop[a] = make_certificate(a, mid, leaf, b);
  loop[b] = make_certificate(b, leaf, mid, a);
  CHECK_THROWS_AS(verify_chain(sign(sample(), mid, a), anchors, loop), ChainError);

  // Chain longer than the depth limit.
  CertificateStore deep;
  std::vector<RsaKey> keys;
  for (int i = 0; i <= kMaxChainDepth + 1; ++i) keys.push_back(RsaKey::generate(1024));
  auto nm = [](int i) { return NdnName::from_uri("/d/" + std::to_string(i) + "/KEY"); };
  for (int i = 1; i <= kMaxChainDepth + 1; ++i) {
    deep[nm(i)] = make_certificate(nm(i), keys[i], keys[i - 1], nm(i - 1));
  }
  const TrustAnchors deep_anchor{{nm(0), keys[0]}};
  CHECK_THROWS_AS(verify_chain(sign(sample(), keys.back(), nm(kMaxChainDepth + 1)), deep_anchor, deep),
                  ChainError);
}
