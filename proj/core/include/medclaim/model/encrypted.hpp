#pragma once

#include <optional>

#include "medclaim/he/evaluator.hpp"
#include "medclaim/model/weights.hpp"

namespace medclaim::model {

/// ct-ct encrypts the weights; ct-pt only encodes them.
enum class WeightMode : std::uint8_t { CtCt = 1, CtPt = 2 };
std::string_view to_string(WeightMode m);
WeightMode weight_mode_from_string(std::string_view s);

/// Weights packed in slots 0..6 like the features. The intercept sits in
/// slot 0 at the level and scale the inner product lands on, so it can be
/// added without adjustment. The polynomial is a public circuit constant.
struct EncryptedModel {
  WeightMode mode = WeightMode::CtCt;
  std::optional<he::Ciphertext> beta_ct;
  std::optional<he::Plaintext> beta_pt;
  std::optional<he::Ciphertext> intercept_ct;
  std::optional<he::Plaintext> intercept_pt;
  SigmoidFit sigmoid;
  std::uint64_t params_id = 0;
};

EncryptedModel encrypt_model(const ModelWeights& w, const he::Evaluator& ev, const he::PublicContext& pc,
                             WeightMode mode, Prng& prng);

/// Standardized features in slots 0..6 at the top level and default scale.
he::Ciphertext encrypt_features(const FeatureVector& x, const he::Evaluator& ev, const he::PublicKey& pk,
                                Prng& prng);

/// Slot 0 of the result holds c0 + c1 z + c3 z^3 with z = beta . x + b.
/// Only evaluation keys are accepted.
he::Ciphertext predict_encrypted(const he::Ciphertext& x, const EncryptedModel& em, const he::Evaluator& ev,
                                 const he::RelinKey& rk, const he::GaloisKeys& gk);

/// Slot 0 of a decrypted result.
double decrypt_slot0(const he::Ciphertext& ct, const he::Evaluator& ev, const he::SecretKey& sk);

Bytes serialize(const EncryptedModel& em);
EncryptedModel deserialize_encrypted_model(ByteView data, const he::HeContext& ctx);

}  // namespace medclaim::model
