#pragma once

// Built-in emoji-to-phrase table; data/emoji.tsv holds the same rows.

#include <array>
#include <string_view>
#include <utility>

namespace ctold {

inline constexpr std::array<std::pair<std::string_view, std::string_view>, 189> kDefaultEmojiTable{{
    {"\xf0\x9f\x98\x80", "grinning face"},
    {"\xf0\x9f\x98\x81", "grinning face with smiling eyes"},
    {"\xf0\x9f\x98\x82", "face with tears of joy"},
    {"\xf0\x9f\x98\x83", "smiling face with open mouth"},
    {"\xf0\x9f\x98\x84", "smiling face with open mouth and smiling eyes"},
    {"\xf0\x9f\x98\x85", "smiling face with open mouth and cold sweat"},
    {"\xf0\x9f\x98\x87", "smiling face with halo"},
    {"\xf0\x9f\x98\x88", "smiling face with horns"},
    {"\xf0\x9f\x98\x89", "winking face"},
    {"\xf0\x9f\x98\x8a", "smiling face with smiling eyes"},
    {"\xf0\x9f\x98\x8b", "face savouring delicious food"},
    {"\xf0\x9f\x98\x8c", "relieved face"},
    {"\xf0\x9f\x98\x8e", "smiling face with sunglasses"},
    {"\xf0\x9f\x98\x8f", "smirking face"},
    {"\xf0\x9f\x98\x90", "neutral face"},
    {"\xf0\x9f\x98\x91", "expressionless face"},
    {"\xf0\x9f\x98\x92", "unamused face"},
    {"\xf0\x9f\x98\x93", "face with cold sweat"},
    {"\xf0\x9f\x98\x94", "pensive face"},
    {"\xf0\x9f\x98\x95", "confused face"},
    {"\xf0\x9f\x98\x96", "confounded face"},
    {"\xf0\x9f\x98\x97", "kissing face"},
    {"\xf0\x9f\x98\x98", "face throwing a kiss"},
    {"\xf0\x9f\x98\x99", "kissing face with smiling eyes"},
    {"\xf0\x9f\x98\x9a", "kissing face with closed eyes"},
    {"\xf0\x9f\x98\x9e", "disappointed face"},
    {"\xf0\x9f\x98\x9f", "worried face"},
    {"\xf0\x9f\x98\xa0", "angry face"},
    {"\xf0\x9f\x98\xa1", "pouting face"},
    {"\xf0\x9f\x98\xa2", "crying face"},
    {"\xf0\x9f\x98\xa3", "persevering face"},
    {"\xf0\x9f\x98\xa4", "face with look of triumph"},
    {"\xf0\x9f\x98\xa5", "disappointed but relieved face"},
    {"\xf0\x9f\x98\xa6", "frowning face with open mouth"},
    {"\xf0\x9f\x98\xa7", "anguished face"},
    {"\xf0\x9f\x98\xa8", "fearful face"},
    {"\xf0\x9f\x98\xa9", "weary face"},
    {"\xf0\x9f\x98\xaa", "sleepy face"},
    {"\xf0\x9f\x98\xab", "tired face"},
    {"\xf0\x9f\x98\xac", "grimacing face"},
    {"\xf0\x9f\x98\xad", "loudly crying face"},
    {"\xf0\x9f\x98\xae", "face with open mouth"},
    {"\xf0\x9f\x98\xaf", "hushed face"},
    {"\xf0\x9f\x98\xb0", "face with open mouth and cold sweat"},
    {"\xf0\x9f\x98\xb1", "face screaming in fear"},
    {"\xf0\x9f\x98\xb2", "astonished face"},
    {"\xf0\x9f\x98\xb3", "flushed face"},
    {"\xf0\x9f\x98\xb4", "sleeping face"},
    {"\xf0\x9f\x98\xb5", "dizzy face"},
    {"\xf0\x9f\x98\xb6", "face without mouth"},
    {"\xf0\x9f\x98\xb7", "face with medical mask"},
    {"\xf0\x9f\x98\xb8", "grinning cat face with smiling eyes"},
    {"\xf0\x9f\x98\xb9", "cat face with tears of joy"},
    {"\xf0\x9f\x98\xba", "smiling cat face with open mouth"},
    {"\xf0\x9f\x98\xbc", "cat face with wry smile"},
    {"\xf0\x9f\x98\xbd", "kissing cat face with closed eyes"},
    {"\xf0\x9f\x98\xbe", "pouting cat face"},
    {"\xf0\x9f\x98\xbf", "crying cat face"},
    {"\xf0\x9f\x99\x80", "weary cat face"},
    {"\xf0\x9f\x99\x81", "slightly frowning face"},
    {"\xf0\x9f\x99\x82", "slightly smiling face"},
    {"\xf0\x9f\x99\x84", "face with rolling eyes"},
    {"\xf0\x9f\x99\x85", "face with no good gesture"},
    {"\xf0\x9f\x99\x86", "face with ok gesture"},
    {"\xf0\x9f\x99\x87", "person bowing deeply"},
    {"\xf0\x9f\x99\x8b", "happy person raising one hand"},
    {"\xf0\x9f\x99\x8c", "person raising both hands in celebration"},
    {"\xf0\x9f\x99\x8d", "person frowning"},
    {"\xf0\x9f\x99\x8e", "person with pouting face"},
    {"\xf0\x9f\x99\x8f", "person with folded hands"},
    {"\xf0\x9f\xa4\x92", "face with thermometer"},
    {"\xf0\x9f\xa4\x93", "nerd face"},
    {"\xf0\x9f\xa4\x94", "thinking face"},
    {"\xf0\x9f\xa4\x96", "robot face"},
    {"\xf0\x9f\xa4\x97", "hugging face"},
    {"\xf0\x9f\xa4\x98", "sign of the horns"},
    {"\xf0\x9f\xa4\x99", "call me hand"},
    {"\xf0\x9f\xa4\x9a", "raised back of hand"},
    {"\xf0\x9f\xa4\x9d", "handshake"},
    {"\xf0\x9f\xa4\x9e", "hand with index and middle fingers crossed"},
    {"\xf0\x9f\xa4\x9f", "i love you hand sign"},
    {"\xf0\x9f\xa4\xa0", "face with cowboy hat"},
    {"\xf0\x9f\xa4\xa1", "clown face"},
    {"\xf0\x9f\xa4\xa2", "nauseated face"},
    {"\xf0\x9f\xa4\xa3", "rolling on the floor laughing"},
    {"\xf0\x9f\xa4\xa4", "drooling face"},
    {"\xf0\x9f\xa4\xa5", "lying face"},
    {"\xf0\x9f\xa4\xa6", "face palm"},
    {"\xf0\x9f\xa4\xa7", "sneezing face"},
    {"\xf0\x9f\xa4\xa8", "face with one eyebrow raised"},
    {"\xf0\x9f\xa4\xa9", "grinning face with star eyes"},
    {"\xf0\x9f\xa4\xaa", "grinning face with one large and one small eye"},
    {"\xf0\x9f\xa4\xab", "face with finger covering closed lips"},
    {"\xf0\x9f\xa4\xac", "serious face with symbols covering mouth"},
    {"\xf0\x9f\xa4\xad", "smiling face with smiling eyes and hand covering mouth"},
    {"\xf0\x9f\xa4\xae", "face with open mouth vomiting"},
    {"\xf0\x9f\xa4\xaf", "shocked face with exploding head"},
    {"\xf0\x9f\xa5\xb0", "smiling face with smiling eyes and three hearts"},
    {"\xf0\x9f\xa5\xb1", "yawning face"},
    {"\xf0\x9f\xa5\xb2", "smiling face with tear"},
    {"\xf0\x9f\xa5\xb3", "face with party horn and party hat"},
    {"\xf0\x9f\xa5\xb4", "face with uneven eyes and wavy mouth"},
    {"\xf0\x9f\xa5\xb5", "overheated face"},
    {"\xf0\x9f\xa5\xb6", "freezing face"},
    {"\xf0\x9f\xa5\xb7", "ninja"},
    {"\xf0\x9f\xa5\xb8", "disguised face"},
    {"\xf0\x9f\xa5\xba", "face with pleading eyes"},
    {"\xf0\x9f\xa5\xbb", "sari"},
    {"\xf0\x9f\xa5\xbc", "lab coat"},
    {"\xf0\x9f\xa5\xbd", "goggles"},
    {"\xf0\x9f\xa5\xbe", "hiking boot"},
    {"\xf0\x9f\xa5\xbf", "flat shoe"},
    {"\xe2\x9d\xa4", "heavy black heart"},
    {"\xf0\x9f\x92\x94", "broken heart"},
    {"\xf0\x9f\x92\x95", "two hearts"},
    {"\xf0\x9f\x92\x96", "sparkling heart"},
    {"\xf0\x9f\x92\x97", "growing heart"},
    {"\xf0\x9f\x92\x99", "blue heart"},
    {"\xf0\x9f\x92\x9a", "green heart"},
    {"\xf0\x9f\x92\x9b", "yellow heart"},
    {"\xf0\x9f\x92\x9c", "purple heart"},
    {"\xf0\x9f\x96\xa4", "black heart"},
    {"\xf0\x9f\xa4\x8d", "white heart"},
    {"\xf0\x9f\x91\x8d", "thumbs up sign"},
    {"\xf0\x9f\x91\x8e", "thumbs down sign"},
    {"\xf0\x9f\x91\x8f", "clapping hands sign"},
    {"\xf0\x9f\x91\x8b", "waving hand sign"},
    {"\xf0\x9f\x91\x8a", "fisted hand sign"},
    {"\xf0\x9f\x91\x8c", "ok hand sign"},
    {"\xf0\x9f\x92\xaa", "flexed biceps"},
    {"\xf0\x9f\x96\x95", "reversed hand with middle finger extended"},
    {"\xe2\x9c\x8c", "victory hand"},
    {"\xf0\x9f\x94\xa5", "fire"},
    {"\xf0\x9f\x92\xaf", "hundred points symbol"},
    {"\xf0\x9f\x92\xa9", "pile of poo"},
    {"\xf0\x9f\x92\x80", "skull"},
    {"\xf0\x9f\x91\xbf", "imp"},
    {"\xf0\x9f\x8e\x89", "party popper"},
    {"\xf0\x9f\x8e\x8a", "confetti ball"},
    {"\xf0\x9f\x8e\x81", "wrapped present"},
    {"\xf0\x9f\x8e\x82", "birthday cake"},
    {"\xf0\x9f\x8e\xb6", "multiple musical notes"},
    {"\xf0\x9f\x8e\xb5", "musical note"},
    {"\xe2\x98\x80", "black sun with rays"},
    {"\xe2\x98\x81", "cloud"},
    {"\xe2\x98\x94", "umbrella with rain drops"},
    {"\xe2\x9a\xa1", "high voltage sign"},
    {"\xe2\x9d\x84", "snowflake"},
    {"\xf0\x9f\x8c\x88", "rainbow"},
    {"\xf0\x9f\x8c\x9f", "glowing star"},
    {"\xe2\xad\x90", "white medium star"},
    {"\xf0\x9f\x8c\x99", "crescent moon"},
    {"\xf0\x9f\x90\xb6", "dog face"},
    {"\xf0\x9f\x90\xb1", "cat face"},
    {"\xf0\x9f\x90\xb7", "pig face"},
    {"\xf0\x9f\x90\xae", "cow face"},
    {"\xf0\x9f\x90\x8d", "snake"},
    {"\xf0\x9f\x90\x80", "rat"},
    {"\xf0\x9f\xa6\x8b", "butterfly"},
    {"\xf0\x9f\x90\xa4", "baby chick"},
    {"\xf0\x9f\x8d\x95", "slice of pizza"},
    {"\xf0\x9f\x8d\x94", "hamburger"},
    {"\xf0\x9f\x8d\xba", "beer mug"},
    {"\xf0\x9f\x8d\xb7", "wine glass"},
    {"\xe2\x98\x95", "hot beverage"},
    {"\xf0\x9f\x8d\x8e", "red apple"},
    {"\xf0\x9f\x8d\xab", "chocolate bar"},
    {"\xf0\x9f\x9a\x97", "automobile"},
    {"\xe2\x9c\x88", "airplane"},
    {"\xf0\x9f\x9a\x80", "rocket"},
    {"\xf0\x9f\x8f\xa0", "house building"},
    {"\xf0\x9f\x93\xb1", "mobile phone"},
    {"\xf0\x9f\x92\xbb", "personal computer"},
    {"\xf0\x9f\x92\xb0", "money bag"},
    {"\xf0\x9f\x92\xb8", "money with wings"},
    {"\xf0\x9f\x9a\xa8", "police cars revolving light"},
    {"\xe2\x9a\xbd", "soccer ball"},
    {"\xf0\x9f\x8f\x80", "basketball and hoop"},
    {"\xf0\x9f\x8f\x86", "trophy"},
    {"\xf0\x9f\x91\x80", "eyes"},
    {"\xf0\x9f\x91\x85", "tongue"},
    {"\xf0\x9f\x91\x84", "mouth"},
    {"\xf0\x9f\x92\x8b", "kiss mark"},
    {"\xf0\x9f\x92\xa5", "collision symbol"},
    {"\xf0\x9f\x92\xa6", "splashing sweat symbol"},
    {"\xf0\x9f\x92\xa8", "dash symbol"},
    {"\xf0\x9f\x92\xa4", "sleeping symbol"},
    {"\xf0\x9f\x92\xa2", "anger symbol"},
    {"\xf0\x9f\x97\xa3", "speaking head in silhouette"},
}};

}  // namespace ctold
