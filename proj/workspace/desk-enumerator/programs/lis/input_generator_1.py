def gen_input(rng, max_len):
    n = rng.randint(max(1, max_len // 2), max_len)
    return f"{n}\n{' '.join(str(rng.randint(1, 6)) for _ in range(n))}\n"
