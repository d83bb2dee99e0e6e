#include <json.hpp>

#include "elicit/error.hpp"
#include "elicit/question_engine.hpp"

namespace elicit::engine {

using nlohmann::json;

const std::vector<PredefinedEntry>& default_bank() {
    static const std::vector<PredefinedEntry> bank{
        {Theme::motivation, "What need or problem led to this dataset being assembled?"},
        {Theme::motivation, "Which person, team or organisation created the dataset, and on whose behalf?"},
        {Theme::motivation, "Who paid for the data to be gathered?"},
        {Theme::motivation, "Was there a specific question the creators hoped to answer with it?"},
        {Theme::motivation, "Were there existing datasets that fell short, and in what way?"},
        {Theme::motivation, "Which decisions is this data meant to inform?"},
        {Theme::motivation, "Is there anything about its origins that a newcomer should know first?"},

        {Theme::composition, "What does a single row in this table represent?"},
        {Theme::composition, "Is this every instance that exists, or a sample drawn from a larger set?"},
        {Theme::composition, "Are any values missing on purpose, and what does a blank mean?"},
        {Theme::composition, "Are there known errors, noise or duplicates in the records?"},
        {Theme::composition, "Does any column hold information that could identify a person?"},
        {Theme::composition, "Are there relationships between rows, such as repeated entities?"},
        {Theme::composition, "Which columns carry units, and what are they?"},

        {Theme::collection_process, "How was each value obtained: measured, reported, or derived?"},
        {Theme::collection_process, "What instruments, software or procedures captured the data?"},
        {Theme::collection_process, "Over what period was the data collected?"},
        {Theme::collection_process, "If this is a sample, how were the instances chosen?"},
        {Theme::collection_process, "Who took part in collecting the data, and how were they compensated?"},
        {Theme::collection_process, "Were the people described aware that data about them was recorded?"},
        {Theme::collection_process, "Did anything change in the collection method partway through?"},

        {Theme::preprocessing, "Was any cleaning or filtering applied before the data reached you?"},
        {Theme::preprocessing, "Were outliers removed or values capped?"},
        {Theme::preprocessing, "Were any columns computed from other columns?"},
        {Theme::preprocessing, "Were categories merged, renamed or recoded?"},
        {Theme::preprocessing, "Is the unprocessed raw data kept anywhere?"},
        {Theme::preprocessing, "Which tools or scripts performed the preprocessing?"},
        {Theme::preprocessing, "Were missing values imputed, and if so how?"},

        {Theme::uses, "What has this dataset already been used for?"},
        {Theme::uses, "Is there a place that lists work built on this data?"},
        {Theme::uses, "What other tasks could it reasonably support?"},
        {Theme::uses, "Are there uses it is clearly unsuitable for?"},
        {Theme::uses, "Could the way the data was gathered bias results drawn from it?"},
        {Theme::uses, "What should an analyst check before drawing conclusions from it?"},
        {Theme::uses, "Which columns matter most for a typical analysis?"},

        {Theme::distribution, "Will the dataset be shared outside the group that created it?"},
        {Theme::distribution, "In what form and through which channel is it distributed?"},
        {Theme::distribution, "Under what licence or terms of use is it released?"},
        {Theme::distribution, "Are there export controls or other legal limits on sharing?"},
        {Theme::distribution, "Has any third party imposed restrictions on the data?"},
        {Theme::distribution, "Does the dataset have a persistent identifier or citation?"},
        {Theme::distribution, "When was it first made available?"},

        {Theme::maintenance, "Who maintains the dataset today?"},
        {Theme::maintenance, "How can the maintainers be reached?"},
        {Theme::maintenance, "Will it be updated, and how often?"},
        {Theme::maintenance, "Is there a record of corrections or errata?"},
        {Theme::maintenance, "Are older versions kept available?"},
        {Theme::maintenance, "Can others contribute additions or fixes?"},
        {Theme::maintenance, "Is there a date after which the data should no longer be relied on?"},
    };
    return bank;
}

std::vector<PredefinedEntry> parse_bank(std::string_view json_text) {
    const auto doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw Error(ErrorCode::InvalidArgument, "bank is not a JSON array");
    std::vector<PredefinedEntry> bank;
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("theme") || !entry.contains("text") ||
            !entry["theme"].is_string() || !entry["text"].is_string()) {
            throw Error(ErrorCode::InvalidArgument, "bank entries need string fields theme and text");
        }
        const auto theme = parse_theme(entry["theme"].get<std::string>());
        if (!theme) throw Error(ErrorCode::InvalidArgument, "unknown theme " + entry["theme"].get<std::string>());
        auto text = entry["text"].get<std::string>();
        if (text.empty()) throw Error(ErrorCode::InvalidArgument, "empty bank question");
        bank.push_back({*theme, std::move(text)});
    }
    return bank;
}

std::string serialize_bank(const std::vector<PredefinedEntry>& bank) {
    json out = json::array();
    for (const auto& e : bank) out.push_back({{"theme", std::string(to_string(e.theme))}, {"text", e.text}});
    return out.dump(2);
}

} // namespace elicit::engine
