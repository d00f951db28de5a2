// SPDX-License-Identifier: Apache-2.0
//
// RSA PKCS#1 v1.5 / SHA-256 packet signatures and certificate-chain checks.
// A certificate is a data packet named after the key it certifies, whose
// content is the DER SubjectPublicKeyInfo, signed by the issuer.

#pragma once

#include "phyauth/ndn_packet.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>

typedef struct evp_pkey_st EVP_PKEY;

namespace phyauth::ndn {

class SecurityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ChainError : public SecurityError {
public:
  using SecurityError::SecurityError;
};

class RsaKey {
public:
  // Fresh key pair; bits in [1024, 4096].
  static RsaKey generate(int bits = 2048);
  static RsaKey from_private_pem(const std::string& pem);
  static RsaKey from_public_pem(const std::string& pem);
  static RsaKey from_public_der(const Bytes& der);

  std::string private_pem() const;
  std::string public_pem() const;
  Bytes public_der() const;
  bool has_private() const { return has_private_; }
  int bits() const;

  // Raw PKCS#1 v1.5 signature over SHA-256(message).
  Bytes sign_bytes(const Bytes& message) const;
  bool verify_bytes(const Bytes& message, const Bytes& signature) const;

  EVP_PKEY* handle() const { return key_.get(); }

private:
  struct Deleter {
    void operator()(EVP_PKEY* k) const;
  };
  RsaKey(EVP_PKEY* k, bool priv) : key_(k, Deleter{}), has_private_(priv) {}

  std::shared_ptr<EVP_PKEY> key_;
  bool has_private_ = false;
};

// Sets key_locator and signature_value. Throws if already signed or the key
// has no private half.
DataPacket sign(const DataPacket& packet, const RsaKey& key, const NdnName& key_name);

// False for unsigned packets or a bad signature.
bool verify(const DataPacket& packet, const RsaKey& public_key);

DataPacket make_certificate(const NdnName& key_name, const RsaKey& subject, const RsaKey& issuer,
                            const NdnName& issuer_name);

using TrustAnchors = std::map<NdnName, RsaKey>;
using CertificateStore = std::map<NdnName, DataPacket>;

inline constexpr int kMaxChainDepth = 8;

// Follows key locators through the store until an anchor. True iff every
// signature on the way verifies. Throws ChainError on a cycle or when more
// than kMaxChainDepth certificates would be needed.
bool verify_chain(const DataPacket& packet, const TrustAnchors& anchors,
                  const CertificateStore& store);

}  // namespace phyauth::ndn
