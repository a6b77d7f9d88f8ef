#pragma once

#include "sensemaker/common/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace sensemaker::llmroles {

inline constexpr char const * prompt_version = "v1";

inline constexpr char const * default_teacher_prompt =
    R"(You are a teacher preparing a quiz about a piece of study material.
You are given the whole section of the material and one excerpt taken from it.
Write exactly one quiz question about the excerpt. The question must be answerable using only the information in the excerpt, without any outside knowledge. Do not ask about the title, the author or the format of the document. Ask about the content.
Also write a short reference answer to the question, taken from the excerpt.
Write the question and the answer in English, even if the material is in another language.
Reply with a JSON object with the fields "question" and "answer".

MATERIAL:
{{material}}

EXCERPT:
{{span}}
)";

inline constexpr char const * default_student_prompt =
    R"(You are a student taking a quiz about a piece of study material.
Answer each question using only the information in the material below. Do not use general knowledge that is not contained in the material. Keep each answer short and to the point.
If a question cannot be answered from the material, say so in the answer instead of guessing.
Reply with a JSON object with the field "answers": a list with exactly one answer per question, in the order of the questions.

MATERIAL:
{{material}}

QUESTIONS:
{{questions}}
)";

inline constexpr char const * default_evaluator_prompt =
    R"(You are grading a student's answer to a quiz question about a piece of study material.
Judge the answer only against the material: the answer must respond to the question and be supported by the material.
Rate the answer on this scale:
0 - no answer, or the answer is unrelated to the question or to the material
1 - the answer is mostly wrong or is not supported by the material
2 - the answer contains some correct information but misses the point of the question
3 - the answer is partly correct but incomplete or contains errors
4 - the answer is correct with minor omissions or inaccuracies
5 - the answer is fully correct, complete and supported by the material
Reply with a JSON object with the single integer field "rating" (0 to 5).

MATERIAL:
{{material}}

QUESTION:
{{question}}

ANSWER:
{{answer}}
)";

inline constexpr char const * default_ranking_prompt =
    R"(You are required to fulfill an api request to a large language model, please respond with the requested filled in freeform text.
Simulate a randomly sampled university student required to prepare for an oral exam by studying the given material. The exam will require memorizing the material as well as learning to think about the topics in the material. The questions are not required to cover all the information in the material but must give at least some coverage of the main topics and pieces of information. We need you to fill the fields in our questionnaire about quiz questions so we can fill in our statistics.
You are a randomly sampled university student required to prepare for an oral exam by studying the given text, we need you to answer our questions about a quiz so we can fill in our statistics.
You are not sure what the exam will contain other than that it will be answerable using information from the text. You are given quiz questions purely to help you understand the text better. Quiz questions are very different than those asked by the teacher during the oral exam.
You should be able answer these questions from the text provided.
Our scientific questionnaire is a simple format string. Each QUESTIONSET_NUMBER: needs to be followed by the corresponding QUESTIONSET number.
{{payload}}
Please fill in the value QUESTIONSET_NUMBER: {} with the correct QUESTIONSET numbers
{{entries}})";

/// Prompt templates for the baseline roles and the triplet judge.
struct PromptSet
{
    std::string teacher = default_teacher_prompt;
    std::string student = default_student_prompt;
    std::string evaluator = default_evaluator_prompt;
    std::string ranking = default_ranking_prompt;

    static constexpr char const * file_names[] = {"teacher", "student", "evaluator", "ranking"};

    std::string & by_name(std::string const & name)
    {
        if (name == "teacher") return teacher;
        if (name == "student") return student;
        if (name == "evaluator") return evaluator;
        if (name == "ranking") return ranking;
        throw ArgumentError("unknown prompt '" + name + "'");
    }

    /// Loads `<name>.<version>.txt` from dir for each prompt, keeping the
    /// default for files that do not exist.
    static PromptSet load(std::filesystem::path const & dir)
    {
        PromptSet p;
        for (auto const * name : file_names) {
            auto const path = dir / (std::string(name) + "." + prompt_version + ".txt");
            std::ifstream in(path, std::ios::binary);
            if (!in) {
                continue;
            }
            std::ostringstream ss;
            ss << in.rdbuf();
            p.by_name(name) = ss.str();
        }
        return p;
    }

    void save(std::filesystem::path const & dir) const
    {
        std::filesystem::create_directories(dir);
        auto copy = *this;
        for (auto const * name : file_names) {
            std::ofstream out(dir / (std::string(name) + "." + prompt_version + ".txt"),
                              std::ios::binary | std::ios::trunc);
            out << copy.by_name(name);
        }
    }
};

} // namespace sensemaker::llmroles
