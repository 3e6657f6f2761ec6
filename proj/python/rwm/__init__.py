from ._rwm import (
    BitString,
    EmbedFailure,
    KeySet,
    LanguageModel,
    PresetInfeasible,
    VerificationKey,
    describe_preset,
    generate,
    hamming_distance,
    keygen,
    load_generation_key,
    load_verification_key,
    preset_names,
    random_bits,
    recover,
    run_attack,
    sketch_size_lower_bound,
    verify,
)

__all__ = [
    "BitString",
    "EmbedFailure",
    "KeySet",
    "LanguageModel",
    "PresetInfeasible",
    "VerificationKey",
    "describe_preset",
    "generate",
    "hamming_distance",
    "keygen",
    "load_generation_key",
    "load_verification_key",
    "preset_names",
    "random_bits",
    "recover",
    "run_attack",
    "sketch_size_lower_bound",
    "verify",
]
