// Generates one scenario, prints three captions for it, and checks its
// motion with the point-mass oracle.
//
//   sample_single_scenario [seed] [index]

#include <cstdlib>
#include <iostream>
#include <string>

#include "animgram/animgram.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 42;
  const std::uint64_t index = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 0;
  const auto& catalog = animgram::default_catalog();
  const auto& lexicon = animgram::default_lexicon();

  const animgram::GenerationOutcome out = animgram::generate_scenario(seed, index, {}, catalog);
  if (!out.ok) {
    std::cerr << "generation failed: " << out.error << "\n";
    return 1;
  }
  const animgram::Scenario& s = out.scenario;
  std::cout << "model: " << animgram::to_string(s.model.kind) << " (relation "
            << animgram::to_string(s.model.relation.kind) << "), " << s.model.constraints.size() << " constraints\n";

  animgram::CaptionSettings cs;
  cs.per_scenario = 3;
  for (const auto& c : animgram::caption_scenario(s, lexicon, cs)) std::cout << "  " << c.text << "\n";

  const auto trace = animgram::simulate(s, catalog);
  const auto verdict = animgram::check_semantics(s.model, trace);
  for (const auto& p : verdict.predicates) std::cout << "oracle: " << p.name << (p.holds ? " holds" : " fails") << "\n";

  const auto report = animgram::validate(s, catalog);
  std::cout << "valid: " << (report.ok() ? "yes" : "no") << "\n";
  for (const auto& p : report.problems()) std::cout << "  " << p << "\n";
  return verdict.ok() ? 0 : 1;
}
