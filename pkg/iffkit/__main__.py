import iffkit.iffkit

if __name__ == "__main__":
    iffkit.iffkit.main()
