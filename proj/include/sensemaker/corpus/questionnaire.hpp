#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sensemaker::corpus {

inline constexpr char const * questionnaire_instructions =
    "For each question-answer pair, address each of these points on a single line numbered "
    "correspondingly, giving 1-5 on opinion-based points. Whenever we are talking about using the "
    "provided texts, this also means using elementary school-level background knowledge. If you "
    "would answer any point as 1, continue to the next question-answer pair:";

/// Renders the manual-evaluation questionnaire: the instruction header and,
/// per question-answer pair, the two numbered points to be filled in.
inline std::string export_questionnaire(std::vector<std::pair<std::string, std::string>> const & items)
{
    std::string out = "# Manual evaluation questionnaire\n\n";
    out += questionnaire_instructions;
    out += "\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += "\n## Question-answer pair " + std::to_string(i + 1) + "\n";
        out += "Question: " + items[i].first + "\n";
        out += "Answer: " + items[i].second + "\n";
        out += "1. is correct.\n";
        out += "2. was created using only the provided texts.\n";
    }
    return out;
}

} // namespace sensemaker::corpus
