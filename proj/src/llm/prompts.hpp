#pragma once

#include <map>
#include <string>

namespace slicereview::llm {

namespace detail {
/// Generated at configure time from prompts/*.txt, keyed by file stem.
const std::map<std::string, std::string>& embedded_prompts();
}  // namespace detail

/// Throws ConfigError for an unknown prompt.
const std::string& prompt_text(const std::string& name);

/// Substitutes every {{key}}. Throws ConfigError when the template names a
/// key that `vars` lacks, so a typo cannot silently ship an empty section.
std::string fill_prompt(const std::string& name, const std::map<std::string, std::string>& vars);

/// Prompt name -> SHA-256 of its text; echoed into run reports.
std::map<std::string, std::string> prompt_hashes();

}  // namespace slicereview::llm
