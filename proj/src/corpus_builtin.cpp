#include <stdexcept>

#include "embias/corpus.hpp"

// Builtin audit datasets. The tables are data, not code: keep entries exactly
// as curated (spelling, case, hyphenation), including repeated target terms
// in the wealth and age association sets.

namespace embias::corpus {
namespace {

ConceptPairSet gender_pairs() {
  return {"gender",
          {{"she", "he"},
           {"daughter", "son"},
           {"her", "him"},
           {"mother", "father"},
           {"woman", "man"},
           {"lady", "gentleman"},
           {"Jane Doe", "John Doe"},
           {"girl", "boy"},
           {"herself", "himself"},
           {"female", "male"},
           {"sister", "brother"},
           {"wife", "husband"},
           {"girlfriend", "boyfriend"},
           {"queen", "king"},
           {"princess", "prince"},
           {"actress", "actor"},
           {"niece", "nephew"},
           {"aunt", "uncle"},
           {"bride", "groom"},
           {"mistress", "master"}}};
}

ConceptPairSet age_pairs() {
  return {"age",
          {{"old", "young"},
           {"elderly", "youthful"},
           {"aged", "youthful"},
           {"senior", "junior"},
           {"ancient", "modern"},
           {"mature", "immature"},
           {"veteran", "novice"},
           {"old-timer", "newcomer"},
           {"retiree", "student"},
           {"granny", "grandchild"},
           {"grandfather", "grandson"},
           {"grandmother", "granddaughter"},
           {"old man", "young man"},
           {"old lady", "young lady"},
           {"senior citizen", "teenager"},
           {"pensioner", "child"},
           {"seniority", "youth"},
           {"old age", "youth"},
           {"elder", "youngster"},
           {"elderliness", "youthfulness"},
           {"grandparent", "grandchild"},
           {"centenarian", "infant"}}};
}

ConceptPairSet wealth_pairs() {
  return {"wealth",
          {{"poverty", "wealth"},
           {"destitute", "affluent"},
           {"broke", "prosperous"},
           {"needy", "opulent"},
           {"impoverished", "luxurious"},
           {"underprivileged", "privileged"},
           {"indigent", "well-off"},
           {"bankrupt", "flush"},
           {"meager", "abundant"},
           {"bare", "lavish"},
           {"humble", "grand"},
           {"scant", "ample"},
           {"struggling", "thriving"},
           {"frugal", "extravagant"},
           {"penniless", "loaded"},
           {"modest", "plush"},
           {"cheap", "expensive"},
           {"sparse", "abundant"},
           {"economical", "spendthrift"},
           {"thrifty", "opulent"},
           {"skimping", "splurging"},
           {"frugality", "exuberance"},
           {"stingy", "generous"},
           {"lean", "fat"},
           {"subsistence", "affluence"},
           {"austere", "sumptuous"},
           {"threadbare", "opulent"},
           {"paltry", "ample"},
           {"deprived", "wealthy"},
           {"scraping", "lavishing"},
           {"measly", "ample"},
           {"scanty", "plentiful"},
           {"tight", "flush"},
           {"penurious", "affluent"},
           {"stripped", "furnished"},
           {"meagerly", "luxuriously"},
           {"barebones", "elaborate"},
           {"barren", "fertile"},
           {"deficient", "sufficient"},
           {"spare", "plush"},
           {"shortage", "surplus"},
           {"hand-to-mouth", "prosperous"},
           {"insufficient", "ample"},
           {"minimalist", "luxurious"}}};
}

LabeledAttributeSet occupations() {
  return {"occupations",
          {{"electrician", 0.89},
           {"surgeon", 0.65},
           {"police officer", 0.75},
           {"homemaker", 0.16},
           {"politician", 0.68},
           {"human resources", 0.28},
           {"miner", 0.94},
           {"beauty therapist", 0.13},
           {"mechanic", 0.88},
           {"writer", 0.56},
           {"construction worker", 0.84},
           {"housekeeper", 0.15},
           {"teacher", 0.39},
           {"interior designer", 0.27},
           {"captain", 0.79},
           {"engineer", 0.68},
           {"bookkeeper", 0.44},
           {"carpenter", 0.78},
           {"truck driver", 0.91},
           {"mathematician", 0.61},
           {"librarian", 0.31},
           {"receptionist", 0.33},
           {"hairdresser", 0.27},
           {"CEO", 0.61},
           {"scientist", 0.53},
           {"firefighter", 0.73},
           {"pilot", 0.75},
           {"philosopher", 0.60},
           {"nurse", 0.23},
           {"social worker", 0.40},
           {"socialite", 0.46},
           {"racer", 0.85},
           {"administrative assistant", 0.34},
           {"manager", 0.66},
           {"stylist", 0.27},
           {"childcare provider", 0.21},
           {"skipper", 0.88},
           {"guidance counselor", 0.36},
           {"accountant", 0.55},
           {"warrior", 0.82},
           {"computer scientist", 0.68},
           {"broadcaster", 0.53},
           {"gamer", 0.73},
           {"plumber", 0.91},
           {"architect", 0.53},
           {"maestro", 0.81},
           {"magician", 0.72},
           {"nanny", 0.18}}};
}

LabeledAttributeSet ethnicities() {
  return {"ethnicities",
          {{"Bantu", 0.25},
           {"Zulu", 0.3},
           {"Somali", 0.2},
           {"Ashanti", 0.4},
           {"Berber", 0.45},
           {"Tuareg", 0.45},
           {"Uyghur", 0.3},
           {"Tibetan", 0.55},
           {"Hmong", 0.4},
           {"Indian", 0.7},
           {"Latino", 0.6},
           {"Caucasian", 0.8},
           {"Greek", 0.75},
           {"Romanian", 0.6},
           {"Scandinavian", 0.75},
           {"Persian", 0.7},
           {"Kurdish", 0.6},
           {"Armenian", 0.65},
           {"Assyrian", 0.55},
           {"Turkish", 0.6},
           {"Jewish", 0.8},
           {"Arab", 0.65},
           {"Mestizo", 0.45},
           {"Quechua", 0.4},
           {"Mapuche", 0.3},
           {"Mulatto", 0.45},
           {"Native American", 0.35},
           {"Cherokee", 0.3},
           {"Navajo", 0.3},
           {"Sioux", 0.25},
           {"Inuit", 0.4},
           {"Maori", 0.45},
           {"Aboriginal Australians", 0.35},
           {"Pacific islander", 0.55}}};
}

LabeledAttributeSet character_traits() {
  return {"character_traits",
          {{"wise", 0.8},
           {"inflexible", 0.7},
           {"knowledgeable", 0.6},
           {"tech-savvy", 0.1},
           {"forgetful", 0.6},
           {"quick learner", 0.2},
           {"slow", 0.6},
           {"energetic", 0.2},
           {"out of touch", 0.8},
           {"adaptable", 0.3},
           {"dependent", 0.5},
           {"active", 0.2},
           {"stuck in their ways", 0.7},
           {"old-fashioned", 0.8},
           {"vibrant", 0.2},
           {"senile", 0.8},
           {"innovative", 0.3},
           {"traditional", 0.7},
           {"dynamic", 0.3},
           {"ambitious", 0.2},
           {"self-reliant", 0.5},
           {"forward-thinking", 0.3},
           {"resourceful", 0.3},
           {"inept with technology", 0.8},
           {"open-minded", 0.3},
           {"stubborn", 0.7},
           {"rigid", 0.7},
           {"cynical", 0.8},
           {"settled", 0.7}}};
}

WeatSpec gender_weat() {
  return {"gender",
          {"she", "daughter", "her", "mother", "woman", "lady", "Jane Doe",
           "girl", "herself", "female", "sister", "wife", "girlfriend",
           "queen", "princess", "actress", "niece", "aunt", "bride",
           "mistress"},
          {"he", "son", "him", "father", "man", "gentleman", "John Doe", "boy",
           "himself", "male", "brother", "husband", "boyfriend", "king",
           "prince", "actor", "nephew", "uncle", "groom", "master"},
          {"homemaker", "human resources", "beauty therapist", "housekeeper",
           "teacher", "interior designer", "bookkeeper", "librarian",
           "receptionist", "hairdresser", "nurse", "social worker",
           "socialite", "administrative assistant", "stylist",
           "childcare provider", "guidance counselor", "nanny"},
          {"electrician", "surgeon", "police officer", "politician", "miner",
           "mechanic", "writer", "construction worker", "captain", "engineer",
           "carpenter", "truck driver", "mathematician", "ceo", "scientist",
           "firefighter", "pilot", "philosopher", "racer", "manager",
           "skipper", "accountant", "warrior", "computer scientist",
           "broadcaster", "gamer", "plumber", "architect", "maestro",
           "magician"}};
}

WeatSpec wealth_weat() {
  return {"wealth",
          {"poverty", "destitute", "broke", "needy", "impoverished",
           "underprivileged", "indigent", "bankrupt", "meager", "bare",
           "humble", "scant", "struggling", "frugal", "penniless", "modest",
           "cheap", "sparse", "economical", "thrifty", "skimping", "frugality",
           "stingy", "lean", "subsistence", "austere", "threadbare", "paltry",
           "deprived", "scraping", "measly", "scanty", "tight", "penurious",
           "stripped", "meagerly", "barebones", "barren", "deficient", "spare",
           "shortage", "hand-to-mouth", "insufficient", "minimalist"},
          {"wealth", "affluent", "prosperous", "opulent", "luxurious",
           "privileged", "well-off", "flush", "abundant", "lavish", "grand",
           "ample", "thriving", "extravagant", "loaded", "plush", "expensive",
           "abundant", "spendthrift", "opulent", "splurging", "exuberance",
           "generous", "fat", "affluence", "sumptuous", "opulent", "ample",
           "wealthy", "lavishing", "ample", "plentiful", "flush", "affluent",
           "furnished", "luxuriously", "elaborate", "fertile", "sufficient",
           "plush", "surplus", "prosperous", "ample", "luxurious"},
          {"Bantu", "Zulu", "Somali", "Ashanti", "Berber", "Tuareg", "Uyghur",
           "Hmong", "Mestizo", "Quechua", "Mapuche", "Mulatto",
           "Native American", "Cherokee", "Navajo", "Sioux", "Inuit", "Maori",
           "Aboriginal Australians"},
          {"Tibetan", "Indian", "Latino", "Caucasian", "Greek", "Romanian",
           "Scandinavian", "Persian", "Kurdish", "Armenian", "Assyrian",
           "Turkish", "Jewish", "Arab", "Pacific islander"}};
}

WeatSpec age_weat() {
  return {"age",
          {"old", "elderly", "aged", "senior", "ancient", "mature", "veteran",
           "old-timer", "retiree", "granny", "grandfather", "grandmother",
           "old man", "old lady", "senior citizen", "pensioner", "seniority",
           "old age", "elder", "elderliness", "grandparent", "centenarian"},
          {"young", "youthful", "youthful", "junior", "modern", "immature",
           "novice", "newcomer", "student", "grandchild", "grandson",
           "granddaughter", "young man", "young lady", "teenager", "child",
           "youth", "youngster", "youthfulness", "grandchild", "infant"},
          {"wise", "inflexible", "knowledgeable", "forgetful", "slow",
           "out-of-touch", "dependent", "stuck in their ways", "old-fashioned",
           "senile", "traditional", "self-reliant", "inept with technology",
           "stubborn", "rigid", "cynical", "settled"},
          {"tech-savvy", "quick learner", "energetic", "adaptable", "active",
           "vibrant", "innovative", "dynamic", "ambitious", "forward-thinking",
           "resourceful", "open-minded", "adaptive", "innocent"}};
}

}  // namespace

std::vector<std::string> builtin_concepts() { return {"gender", "age", "wealth"}; }

BuiltinBundle load_builtin(const std::string& concept_name) {
  if (concept_name == "gender") return {gender_pairs(), occupations(), gender_weat()};
  if (concept_name == "age") return {age_pairs(), character_traits(), age_weat()};
  if (concept_name == "wealth") return {wealth_pairs(), ethnicities(), wealth_weat()};
  throw std::invalid_argument("unknown builtin concept '" + concept_name +
                              "' (expected gender, age, or wealth)");
}

}  // namespace embias::corpus
