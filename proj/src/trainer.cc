// Copyright (c) 2026 DCA Verification Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dca/trainer.h"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "dca/binary_io.h"
#include "dca/error.h"
#include "dca/random.h"

namespace dca {

namespace {

constexpr char kCheckpointMagic[] = "DCAC";
constexpr std::uint16_t kCheckpointVersion = 1;
constexpr std::uint64_t kTrainStream = 3;

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;

void AdamUpdate(ModelParams& params, const std::vector<Matrix>& grads,
                double lr, AdamState& adam) {
  ++adam.step;
  const double correction1 = 1.0 - std::pow(kBeta1, double(adam.step));
  const double correction2 = 1.0 - std::pow(kBeta2, double(adam.step));
  std::size_t i = 0;
  VisitParameters(params, [&](const std::string&, Matrix& w) {
    auto g = grads[i].data();
    auto m = adam.first_moment[i].mutable_data();
    auto v = adam.second_moment[i].mutable_data();
    auto theta = w.mutable_data();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g[k];
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      theta[k] -= lr * m_hat / (std::sqrt(v_hat) + kEpsilon);
    }
    w.CheckFinite("adam");
    ++i;
  });
}

void CheckDims(const ExperimentConfig& config, const Utterance& utt) {
  if (utt.audio.dim() != config.d_a || utt.visual.dim() != config.d_v ||
      utt.audio.clips() != utt.visual.clips()) {
    Fail(ErrorCode::kInvalidShape,
         "utterance " + utt.id + " has dims " + std::to_string(utt.audio.dim()) +
             "/" + std::to_string(utt.visual.dim()) + " but the model expects " +
             std::to_string(config.d_a) + "/" + std::to_string(config.d_v));
  }
}

}  // namespace

TrainResult Train(const ExperimentConfig& config,
                  const std::vector<Utterance>& data) {
  config.Validate();
  if (data.empty()) {
    Fail(ErrorCode::kInsufficientData, "training set is empty");
  }
  for (const Utterance& u : data) {
    CheckDims(config, u);
    if (u.speaker_index >= config.n_speakers) {
      Fail(ErrorCode::kIndex, "utterance " + u.id + " has label " +
                                  std::to_string(u.speaker_index) + " but only " +
                                  std::to_string(config.n_speakers) +
                                  " speakers are configured");
    }
  }

  Rng rng(DeriveSeed(config.seed, kTrainStream));
  TrainResult result;
  Checkpoint& ckpt = result.checkpoint;
  ckpt.config = config;
  ckpt.config_hash = ConfigHash(config);
  ckpt.params = InitModel(ShapeFromConfig(config, config.variant), rng);
  VisitParameters(ckpt.params, [&](const std::string&, const Matrix& w) {
    ckpt.adam.first_moment.emplace_back(w.rows(), w.cols());
    ckpt.adam.second_moment.emplace_back(w.rows(), w.cols());
  });

  std::vector<std::size_t> order(data.size());
  std::vector<Matrix> batch_grads, grads;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.Shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double inv = 1.0 / double(end - start);
      double loss = 0.0;
      try {
        for (std::size_t k = start; k < end; ++k) {
          loss += LossAndGradients(ckpt.params, data[order[k]], &grads);
          if (k == start) {
            batch_grads = grads;
          } else {
            for (std::size_t i = 0; i < grads.size(); ++i)
              batch_grads[i] = Add(batch_grads[i], grads[i]);
          }
        }
        loss *= inv;
        if (!std::isfinite(loss)) {
          Fail(ErrorCode::kNumericDomain, "non-finite batch loss");
        }
        for (Matrix& g : batch_grads) g = Scale(g, inv);
        AdamUpdate(ckpt.params, batch_grads, config.learning_rate, ckpt.adam);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNumericDomain) throw;
        Fail(ErrorCode::kTrainingDiverged,
             "training diverged at step " + std::to_string(ckpt.adam.step + 1) +
                 ": " + e.what());
      }
      result.losses.push_back(loss);
    }
  }
  ckpt.rng_state = rng.SaveState();
  return result;
}

UtteranceEmbedding EmbedUtterance(const Checkpoint& ckpt, const Utterance& utt) {
  CheckDims(ckpt.config, utt);
  return Embed(ckpt.params, utt);
}

ScoreSet ScoreTrials(const Checkpoint& ckpt, const std::vector<Trial>& trials,
                     const std::vector<Utterance>& features,
                     std::size_t threads) {
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < features.size(); ++i) by_id.emplace(features[i].id, i);

  // Embed each referenced utterance once, in first-use order.
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::size_t> needed;
  for (const Trial& t : trials) {
    for (const std::string* id : {&t.enroll_id, &t.test_id}) {
      auto it = by_id.find(*id);
      if (it == by_id.end()) {
        Fail(ErrorCode::kMissingUtterance, "no features for utterance " + *id);
      }
      if (slot.emplace(*id, needed.size()).second) needed.push_back(it->second);
    }
  }
  std::vector<UtteranceEmbedding> embeddings(needed.size());
  auto work = [&](std::atomic<std::size_t>& next) {
    for (std::size_t k; (k = next++) < needed.size();) {
      embeddings[k] = EmbedUtterance(ckpt, features[needed[k]]);
    }
  };
  std::atomic<std::size_t> next{0};
  if (threads <= 1) {
    work(next);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(next);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<TrialScore> scores;
  scores.reserve(trials.size());
  for (const Trial& t : trials) {
    scores.push_back({t.enroll_id, t.test_id, t.label,
                      CosineScore(embeddings[slot.at(t.enroll_id)],
                                  embeddings[slot.at(t.test_id)])});
  }
  return ScoreSet(std::move(scores));
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.Bytes(kCheckpointMagic);
  w.U16(kCheckpointVersion);
  w.String(ToJson(ckpt.config).dump());
  w.String(ckpt.config_hash);
  w.U64(ckpt.adam.step);
  w.String(ckpt.rng_state);
  std::vector<const Matrix*> tensors;
  VisitParameters(ckpt.params, [&](const std::string&, const Matrix& m) {
    tensors.push_back(&m);
  });
  for (const Matrix& m : ckpt.adam.first_moment) tensors.push_back(&m);
  for (const Matrix& m : ckpt.adam.second_moment) tensors.push_back(&m);
  w.U32(static_cast<std::uint32_t>(tensors.size()));
  for (const Matrix* m : tensors) {
    w.U32(static_cast<std::uint32_t>(m->rows()));
    w.U32(static_cast<std::uint32_t>(m->cols()));
    for (double v : m->data()) w.F64(v);
  }
  return w.data();
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  ByteReader r(bytes, "checkpoint");
  if (r.Bytes(4) != kCheckpointMagic) {
    Fail(ErrorCode::kFormat, "not a checkpoint (bad magic)");
  }
  const std::uint16_t version = r.U16();
  if (version != kCheckpointVersion) {
    Fail(ErrorCode::kFormat,
         "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  try {
    ckpt.config = ConfigFromJson(nlohmann::json::parse(r.String()));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kFormat, std::string("checkpoint config: ") + e.what());
  }
  ckpt.config_hash = r.String();
  ckpt.adam.step = r.U64();
  ckpt.rng_state = r.String();

  // The config fixes the parameter layout.
  ckpt.params = ZeroModel(ShapeFromConfig(ckpt.config, ckpt.config.variant));
  const std::size_t n = ParameterCount(ckpt.params);
  const std::uint32_t count = r.U32();
  if (count != 3 * n) {
    Fail(ErrorCode::kFormat, "checkpoint holds " + std::to_string(count) +
                                 " tensors, expected " + std::to_string(3 * n));
  }
  auto read_into = [&](Matrix& m) {
    const std::size_t offset = r.offset();
    const std::uint32_t rows = r.U32();
    const std::uint32_t cols = r.U32();
    if (rows != m.rows() || cols != m.cols()) {
      Fail(ErrorCode::kFormat, "tensor at byte offset " + std::to_string(offset) +
                                   " has shape " + ShapeString(rows, cols) +
                                   ", expected " + m.ShapeString());
    }
    for (double& v : m.mutable_data()) v = r.F64();
    m.CheckFinite("checkpoint");
  };
  VisitParameters(ckpt.params,
                  [&](const std::string&, Matrix& m) { read_into(m); });
  VisitParameters(ckpt.params, [&](const std::string&, Matrix& m) {
    ckpt.adam.first_moment.emplace_back(m.rows(), m.cols());
    read_into(ckpt.adam.first_moment.back());
  });
  VisitParameters(ckpt.params, [&](const std::string&, Matrix& m) {
    ckpt.adam.second_moment.emplace_back(m.rows(), m.cols());
    read_into(ckpt.adam.second_moment.back());
  });
  if (!r.done()) {
    Fail(ErrorCode::kCorruptFile, "trailing bytes after checkpoint at offset " +
                                      std::to_string(r.offset()));
  }
  return ckpt;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  WriteFileBytes(path, SerializeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::string& path) {
  return DeserializeCheckpoint(ReadFileBytes(path));
}

}  // namespace dca
