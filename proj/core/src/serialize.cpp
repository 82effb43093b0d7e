// Model file layout, version 1 (all integers little-endian):
//
//   8 bytes   magic "PSMAUDIT"
//   u32       format version
//   u8        ModelKind
//   u32 + N   header: JSON object (kind, params, corpus metadata)
//   u64       payload length
//   ...       payload, written by the model's write_payload
//   u64       FNV-1a of the payload
//
// Payloads:
//   list     u64 n, then n x (str password, u64 count) sorted by password
//   markov   str alphabet, u64 rows, then per row u64 key, u64 n,
//            n x (u8 symbol, u64 count)
//   grammar  [chunk only: str alphabet, u64 n, n x (str left, str right)]
//            u64 labels, labels x str, per label u64 n, n x (str, u64),
//            u64 templates, per template u64 n, n x u32 label, u64 count
// Strings are u32 length + bytes.

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "binary_io.hpp"
#include "models_impl.hpp"
#include "psmaudit/error.hpp"
#include "psmaudit/model.hpp"
#include "psmaudit/rng.hpp"

namespace psmaudit {

namespace {

constexpr std::string_view kMagic = "PSMAUDIT";

using ojson = nlohmann::ordered_json;

ojson info_to_json(const ModelInfo& info) {
  const ModelParams& p = info.params;
  ojson params;
  params["order"] = p.order;
  params["smoothing"] = p.smoothing;
  params["gamma"] = p.gamma;
  params["backoff_threshold"] = p.backoff_threshold;
  params["vocab_size"] = p.vocab_size;
  params["min_merge_count"] = p.min_merge_count;
  params["max_length"] = p.max_length;
  params["seed"] = p.seed;

  ojson j;
  j["kind"] = std::string(to_string(info.kind));
  j["params"] = std::move(params);
  j["corpus_fingerprint"] = info.corpus_fingerprint;
  j["corpus_total"] = info.corpus_total;
  j["corpus_unique"] = info.corpus_unique;
  j["source_label"] = info.source_label;
  return j;
}

ModelInfo info_from_json(const std::string& text) {
  try {
    auto j = ojson::parse(text);
    ModelInfo info;
    info.kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto& p = j.at("params");
    info.params.order = p.at("order").get<int>();
    info.params.smoothing = p.at("smoothing").get<double>();
    info.params.gamma = p.at("gamma").get<double>();
    info.params.backoff_threshold = p.at("backoff_threshold").get<std::uint64_t>();
    info.params.vocab_size = p.at("vocab_size").get<std::size_t>();
    info.params.min_merge_count = p.at("min_merge_count").get<std::uint64_t>();
    info.params.max_length = p.at("max_length").get<std::size_t>();
    info.params.seed = p.at("seed").get<std::uint64_t>();
    info.corpus_fingerprint = j.at("corpus_fingerprint").get<std::uint64_t>();
    info.corpus_total = j.at("corpus_total").get<std::uint64_t>();
    info.corpus_unique = j.at("corpus_unique").get<std::uint64_t>();
    info.source_label = j.at("source_label").get<std::string>();
    return info;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("model header: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DecodeError(std::string("model header: ") + e.what());
  }
}

}  // namespace

std::string model_info_json(const ModelInfo& info) {
  return info_to_json(info).dump();
}

std::string serialize_model(const PasswordModel& model) {
  std::string payload;
  BinaryWriter pw(payload);
  model.write_payload(pw);

  std::string out;
  BinaryWriter w(out);
  out.append(kMagic);
  w.u32(kModelFormatVersion);
  w.u8(static_cast<std::uint8_t>(model.kind()));
  w.str(model_info_json(model.info()));
  w.u64(payload.size());
  out.append(payload);
  Fnv1a h;
  h.update(payload);
  w.u64(h.digest());
  return out;
}

std::unique_ptr<PasswordModel> deserialize_model(std::string_view bytes) {
  if (bytes.size() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic)
    throw DecodeError("not a model file (bad magic)");
  BinaryReader r(bytes.substr(kMagic.size()));
  std::uint32_t version = r.u32();
  if (version != kModelFormatVersion)
    throw DecodeError("unsupported model format version " +
                      std::to_string(version));
  std::uint8_t kind_byte = r.u8();
  if (kind_byte > static_cast<std::uint8_t>(ModelKind::ChunkPcfg))
    throw DecodeError("unknown model kind in file");
  ModelInfo info = info_from_json(r.str());
  if (static_cast<std::uint8_t>(info.kind) != kind_byte)
    throw DecodeError("model kind byte disagrees with header");

  std::uint64_t n = r.u64();
  if (n > r.remaining()) throw DecodeError("model file truncated");
  const std::size_t payload_at = bytes.size() - r.remaining();
  std::string_view payload = bytes.substr(payload_at, n);
  BinaryReader tail(bytes.substr(payload_at + n));
  std::uint64_t checksum = tail.u64();
  if (!tail.done()) throw DecodeError("trailing bytes after model payload");
  Fnv1a h;
  h.update(payload);
  if (h.digest() != checksum) throw DecodeError("model payload checksum mismatch");

  BinaryReader in(payload);
  std::unique_ptr<PasswordModel> model;
  switch (info.kind) {
    case ModelKind::List:
      model = ListModel::read(std::move(info), in);
      break;
    case ModelKind::NGram:
    case ModelKind::Backoff:
    case ModelKind::AdaptiveNGram:
      model = MarkovModel::read(std::move(info), in);
      break;
    case ModelKind::Pcfg:
    case ModelKind::ChunkPcfg:
      model = GrammarModel::read(std::move(info), in);
      break;
  }
  if (!in.done()) throw DecodeError("unused bytes in model payload");
  return model;
}

void save_model(const PasswordModel& model, const std::filesystem::path& path) {
  std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::unique_ptr<PasswordModel> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return deserialize_model(bytes);
}

}  // namespace psmaudit
