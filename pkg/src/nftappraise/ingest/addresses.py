"""Contract addresses of the tracked collections.

Several addresses in the originally circulated list had the letter 'o'
where a zero belongs and fail validation as printed. The corrected forms
are used here; the printed originals are kept alongside for reference.
"""

COLLECTIONS = {
    # printed: 0x2ABb22d74Dbc2BoF3C9BAC9f173ef35DdB2Co809
    "Geisha Tea House": "0x2ABb22d74Dbc2B0F3C9BAC9f173ef35DdB2C0809",
    # printed: 0xBC4CAoEdA7647A8aB7C2061c2E118A18a936f13D
    "Bored Ape Yacht Club": "0xBC4CA0EdA7647A8aB7C2061c2E118A18a936f13D",
    "Cryptopunks": "0xb47e3cd837dDF8e4c57F05d70Ab865de6e193BBB",
    "Doodles": "0x8a90CAb2b38dba80c64b7734e58Ee1dB38B8992e",
    "Azuki": "0xED5AF388653567Af2F388E6224dC7C4b3241C544",
    "Deadfellaz": "0x2acAb3DEa77832C09420663b0E1cB386031bA17B",
    "Gutter Cat Gang": "0xEdB61f74B0d09B2558F1eeb79B247c1F363Ae452",
    "Sup Ducks": "0x3Fe1a4c1481c8351E91B64D5c398b159dE07cbc5",
    "Cyber Kongs": "0x57a204AA1042f6E66DD7730813f4024114d74f37",
    "Creature World": "0xc92cedDfb8dd984A89fb494c376f9A48b999aAFc",
    "Cool Cats": "0x1A92f7381B9F03921564a437210bB9396471050C",
    # printed: 0xe785E82358879F061BC3dcAC6fo444462D4b5330
    "World of Women": "0xe785E82358879F061BC3dcAC6f0444462D4b5330",
    "Alien Frens": "0xd23d2D4aA76df5C4A19e1c9b6A83EA83f8c3db18",
    # printed: 0x8943C7bAC1914C9A7ABa750Bf2B6Bo9Fd21037E0
    "Lazy Lions": "0x8943C7bAC1914C9A7ABa750Bf2B6B09Fd21037E0",
}

PRINTED = {
    "Geisha Tea House": "0x2ABb22d74Dbc2BoF3C9BAC9f173ef35DdB2Co809",
    "Bored Ape Yacht Club": "0xBC4CAoEdA7647A8aB7C2061c2E118A18a936f13D",
    "World of Women": "0xe785E82358879F061BC3dcAC6fo444462D4b5330",
    "Lazy Lions": "0x8943C7bAC1914C9A7ABa750Bf2B6Bo9Fd21037E0",
}
