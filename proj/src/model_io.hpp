#ifndef ARBOR_MODEL_IO_HPP
#define ARBOR_MODEL_IO_HPP

#include <string>
#include <string_view>

#include "model.hpp"
#include "trainer.hpp"

namespace arbor {

// Versioned binary container: magic, format version, canonical-text config,
// vocabularies, then named parameter arrays as little-endian float32 with
// explicit shapes. Parameters are held in double precision at runtime and
// rounded to float32 on save.
std::string serialize_model(const ParserModel& model);
ParserModel deserialize_model(std::string_view bytes);

void save_model(const ParserModel& model, const std::string& path);
ParserModel load_model(const std::string& path);

// Canonical JSON for the config block and the config file facade.
std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(std::string_view json_text);

// Strict parse of a user config file holding both the model configuration
// and the training schedule; omitted keys take the defaults.
void parse_config_file(std::string_view text, ModelConfig& config, TrainSchedule& schedule);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace arbor

#endif
