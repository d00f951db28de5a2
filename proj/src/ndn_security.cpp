// SPDX-License-Identifier: Apache-2.0

#include "phyauth/ndn_security.hpp"

#include <openssl/bio.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/rsa.h>
#include <openssl/x509.h>

#include <set>

namespace phyauth::ndn {

namespace {

[[noreturn]] void fail(const std::string& what) {
  const unsigned long e = ERR_get_error();
  char buf[256] = {0};
  if (e != 0) {
    ERR_error_string_n(e, buf, sizeof buf);
  }
  ERR_clear_error();
  throw SecurityError(what + (e ? std::string(": ") + buf : std::string()));
}

using BioPtr = std::unique_ptr<BIO, decltype(&BIO_free)>;
using CtxPtr = std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

std::string bio_to_string(BIO* bio) {
  char* data = nullptr;
  const long len = BIO_get_mem_data(bio, &data);
  return std::string(data, static_cast<std::size_t>(len));
}

}  // namespace

void RsaKey::Deleter::operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }

RsaKey RsaKey::generate(int bits) {
  if (bits < 1024 || bits > 4096) {
    throw SecurityError("RSA key size must be within 1024..4096 bits");
  }
  CtxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_RSA, nullptr), EVP_PKEY_CTX_free);
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_rsa_keygen_bits(ctx.get(), bits) <= 0) {
    fail("RSA keygen setup");
  }
  EVP_PKEY* k = nullptr;
  if (EVP_PKEY_keygen(ctx.get(), &k) <= 0) {
    fail("RSA keygen");
  }
  RsaKey out(k, true);
  return out;
}

RsaKey RsaKey::from_private_pem(const std::string& pem) {
  BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())), BIO_free);
  EVP_PKEY* k = PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr);
  if (!k) {
    fail("cannot parse private key PEM");
  }
  if (EVP_PKEY_get_base_id(k) != EVP_PKEY_RSA) {
    EVP_PKEY_free(k);
    throw SecurityError("PEM key is not RSA");
  }
  RsaKey out(k, true);
  return out;
}

RsaKey RsaKey::from_public_pem(const std::string& pem) {
  BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())), BIO_free);
  EVP_PKEY* k = PEM_read_bio_PUBKEY(bio.get(), nullptr, nullptr, nullptr);
  if (!k) {
    fail("cannot parse public key PEM");
  }
  RsaKey out(k, false);
  return out;
}

RsaKey RsaKey::from_public_der(const Bytes& der) {
  const unsigned char* p = der.data();
  EVP_PKEY* k = d2i_PUBKEY(nullptr, &p, static_cast<long>(der.size()));
  if (!k) {
    fail("cannot parse public key DER");
  }
  RsaKey out(k, false);
  return out;
}

std::string RsaKey::private_pem() const {
  if (!has_private_) {
    throw SecurityError("key has no private half");
  }
  BioPtr bio(BIO_new(BIO_s_mem()), BIO_free);
  if (PEM_write_bio_PrivateKey(bio.get(), key_.get(), nullptr, nullptr, 0, nullptr, nullptr) != 1) {
    fail("PEM export");
  }
  return bio_to_string(bio.get());
}

std::string RsaKey::public_pem() const {
  BioPtr bio(BIO_new(BIO_s_mem()), BIO_free);
  if (PEM_write_bio_PUBKEY(bio.get(), key_.get()) != 1) {
    fail("PEM export");
  }
  return bio_to_string(bio.get());
}

Bytes RsaKey::public_der() const {
  const int len = i2d_PUBKEY(key_.get(), nullptr);
  if (len <= 0) {
    fail("DER export");
  }
  Bytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  i2d_PUBKEY(key_.get(), &p);
  return out;
}

int RsaKey::bits() const { return EVP_PKEY_get_bits(key_.get()); }

Bytes RsaKey::sign_bytes(const Bytes& message) const {
  if (!has_private_) {
    throw SecurityError("signing needs a private key");
  }
  MdCtxPtr md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_PKEY_CTX* pctx = nullptr;
  if (!md || EVP_DigestSignInit(md.get(), &pctx, EVP_sha256(), nullptr, key_.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PADDING) <= 0) {
    fail("sign init");
  }
  std::size_t len = 0;
  if (EVP_DigestSign(md.get(), nullptr, &len, message.data(), message.size()) != 1) {
    fail("sign size");
  }
  Bytes sig(len);
  if (EVP_DigestSign(md.get(), sig.data(), &len, message.data(), message.size()) != 1) {
    fail("sign");
  }
  sig.resize(len);
  return sig;
}

bool RsaKey::verify_bytes(const Bytes& message, const Bytes& signature) const {
  MdCtxPtr md(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_PKEY_CTX* pctx = nullptr;
  if (!md || EVP_DigestVerifyInit(md.get(), &pctx, EVP_sha256(), nullptr, key_.get()) != 1 ||
      EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PADDING) <= 0) {
    fail("verify init");
  }
  const int rc = EVP_DigestVerify(md.get(), signature.data(), signature.size(), message.data(),
                                  message.size());
  ERR_clear_error();
  return rc == 1;
}

DataPacket sign(const DataPacket& packet, const RsaKey& key, const NdnName& key_name) {
  if (packet.is_signed()) {
    throw SecurityError("packet is already signed");
  }
  DataPacket out = packet;
  out.key_locator = key_name;
  out.signature_value = key.sign_bytes(signed_portion(packet));
  return out;
}

bool verify(const DataPacket& packet, const RsaKey& public_key) {
  if (!packet.signature_value || packet.signature_value->empty()) {
    return false;
  }
  return public_key.verify_bytes(signed_portion(packet), *packet.signature_value);
}

DataPacket make_certificate(const NdnName& key_name, const RsaKey& subject, const RsaKey& issuer,
                            const NdnName& issuer_name) {
  DataPacket cert;
  cert.name = key_name;
  cert.content = subject.public_der();
  return sign(cert, issuer, issuer_name);
}

bool verify_chain(const DataPacket& packet, const TrustAnchors& anchors,
                  const CertificateStore& store) {
  std::set<NdnName> visited;
  const DataPacket* current = &packet;
  int depth = 0;
  while (true) {
    if (!current->key_locator || !current->is_signed()) {
      return false;
    }
    const NdnName& loc = *current->key_locator;
    if (auto a = anchors.find(loc); a != anchors.end()) {
      return verify(*current, a->second);
    }
    if (!visited.insert(loc).second) {
      throw ChainError("key locator cycle at " + loc.to_uri());
    }
    auto c = store.find(loc);
    if (c == store.end()) {
      return false;
    }
    RsaKey key = [&] {
      try {
        return RsaKey::from_public_der(c->second.content);
      } catch (const SecurityError&) {
        throw ChainError("certificate " + loc.to_uri() + " does not hold a public key");
      }
    }();
    if (!verify(*current, key)) {
      return false;
    }
    if (++depth > kMaxChainDepth) {
      throw ChainError("certificate chain deeper than " + std::to_string(kMaxChainDepth));
    }
    current = &c->second;
  }
}

}  // namespace phyauth::ndn
