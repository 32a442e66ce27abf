def gen_input(rng, max_len):
    n = rng.randint(max(1, max_len // 2), max_len)
    return "".join(rng.choice("abc") for _ in range(n)) + "\n"
