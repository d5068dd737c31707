package com.alpha.notes;

import javax.crypto.Cipher;
import javax.crypto.spec.SecretKeySpec;

public class NoteCipher {
    public byte[] seal(byte[] plain) throws Exception {
        byte[] key = new byte[16];
        SecretKeySpec spec = new SecretKeySpec(key, "AES"); //@ kind=SecretKeyConstruction value=AES via=literal bits=128 label=ConditionallySafe
        Cipher c = Cipher.getInstance("AES/CBC/PKCS5Padding"); //@ kind=CipherFactory value=AES/CBC/PKCS5Padding via=literal label=ConditionallySafe
        c.init(Cipher.ENCRYPT_MODE, spec);
        return c.doFinal(plain);
    }
}
